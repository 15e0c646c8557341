#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aspa/cli.hpp"
#include "test_support.hpp"

using namespace aspa;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return CliResult{code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("aspa-cli-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

Bytes slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return Bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("diff then apply reproduces the new class through the cli") {
  TempDir dir;
  std::string patch = dir.file("foo.aspa");
  std::string out_class = dir.file("out.class");

  CliResult diffed = run_cli({"diff", test::fixture_path("Foo_old.class"),
                              test::fixture_path("Foo_new.class"), "-o", patch});
  REQUIRE(diffed.err == "");
  REQUIRE(diffed.exit_code == 0);

  CliResult applied = run_cli({"apply", test::fixture_path("Foo_old.class"), patch, "-o", out_class});
  REQUIRE(applied.err == "");
  REQUIRE(applied.exit_code == 0);

  ClassAst result = parse_class(slurp(out_class));
  CHECK(canonical_equal(result, test::parse_fixture("Foo_new.class")));
}

TEST_CASE("cli output files are byte-deterministic") {
  TempDir dir;
  std::string p1 = dir.file("one.aspa");
  std::string p2 = dir.file("two.aspa");
  REQUIRE(run_cli({"diff", test::fixture_path("Zoo.class"), test::fixture_path("Zoo_permuted.class"),
                   "-o", p1})
              .exit_code == 0);
  REQUIRE(run_cli({"diff", test::fixture_path("Zoo.class"), test::fixture_path("Zoo_permuted.class"),
                   "-o", p2})
              .exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("dump renders the patch text") {
  TempDir dir;
  std::string patch = dir.file("foo.aspa");
  REQUIRE(run_cli({"diff", test::fixture_path("Foo_old.class"), test::fixture_path("Foo_new.class"),
                   "-o", patch})
              .exit_code == 0);
  CliResult dumped = run_cli({"dump", patch});
  REQUIRE(dumped.exit_code == 0);
  CHECK(dumped.out.find("- int getX()") != std::string::npos);
  CHECK(dumped.out.find("+ void setX(int)") != std::string::npos);
  CHECK(dumped.out.find("p toy/Foo {") != std::string::npos);
}

TEST_CASE("applying to the wrong base exits 3 and names the mismatch") {
  TempDir dir;
  std::string patch = dir.file("foo.aspa");
  REQUIRE(run_cli({"diff", test::fixture_path("Foo_old.class"), test::fixture_path("Foo_new.class"),
                   "-o", patch})
              .exit_code == 0);
  CliResult applied =
      run_cli({"apply", test::fixture_path("Foo_new.class"), patch, "-o", dir.file("out.class")});
  CHECK(applied.exit_code == 3);
  CHECK(applied.err.find("getX") != std::string::npos);
}

TEST_CASE("archive diff and apply work end to end") {
  TempDir dir;
  // build two archives with the cli-facing writer
  ArchiveContents old_arch, new_arch;
  ClassAst foo_old = test::parse_fixture("Foo_old.class");
  ClassAst foo_new = test::parse_fixture("Foo_new.class");
  old_arch.classes.emplace("toy/Foo", foo_old);
  old_arch.resources.emplace("notes/readme.txt", Bytes{'h', 'i'});
  new_arch.classes.emplace("toy/Foo", foo_new);
  new_arch.classes.emplace("toy/Extra", test::make_class("toy/Extra"));
  new_arch.resources.emplace("notes/readme.txt", Bytes{'h', 'i'});

  std::string old_jar = dir.file("old.jar");
  std::string new_jar = dir.file("new.jar");
  {
    Bytes old_bytes = write_archive(old_arch);
    Bytes new_bytes = write_archive(new_arch);
    std::ofstream(old_jar, std::ios::binary)
        .write(reinterpret_cast<const char*>(old_bytes.data()), old_bytes.size());
    std::ofstream(new_jar, std::ios::binary)
        .write(reinterpret_cast<const char*>(new_bytes.data()), new_bytes.size());
  }

  std::string patch = dir.file("upgrade.aspa");
  REQUIRE(run_cli({"diff", old_jar, new_jar, "-o", patch}).exit_code == 0);
  std::string out_jar = dir.file("patched.jar");
  REQUIRE(run_cli({"apply", old_jar, patch, "-o", out_jar}).exit_code == 0);

  ArchiveContents rebuilt = read_archive(slurp(out_jar));
  REQUIRE(rebuilt.classes.size() == 2);
  CHECK(canonical_equal(rebuilt.classes.at("toy/Foo"), foo_new));
  CHECK(rebuilt.classes.count("toy/Extra") == 1);

  CliResult dumped = run_cli({"dump", patch});
  CHECK(dumped.out.find("+ class toy/Extra") != std::string::npos);
}

TEST_CASE("stats prints the table columns") {
  CliResult text = run_cli({"stats", test::fixture_path("Foo_old.class"),
                            test::fixture_path("Foo_new.class")});
  REQUIRE(text.exit_code == 0);
  CHECK(text.out.find("patched: 1") != std::string::npos);
  CHECK(text.out.find("added:   0") != std::string::npos);
  CHECK(text.out.find("removed: 0") != std::string::npos);
  CHECK(text.out.find("total:   1") != std::string::npos);
  CHECK(text.out.find("patch:") != std::string::npos);

  CliResult tsv = run_cli({"stats", test::fixture_path("Foo_old.class"),
                           test::fixture_path("Foo_new.class"), "--format", "tsv"});
  REQUIRE(tsv.exit_code == 0);
  CHECK(tsv.out.find("p\t+\t-\ttotal\tbytes") != std::string::npos);
  CHECK(tsv.out.find("1\t0\t0\t1\t") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run_cli({}).exit_code == 1);
  CHECK(run_cli({"diff"}).exit_code == 1);
  CHECK(run_cli({"frobnicate", "x"}).exit_code == 1);
  CHECK(run_cli({"stats", "a", "b", "--format", "xml"}).exit_code == 1);
}

TEST_CASE("format and io errors exit 2") {
  TempDir dir;
  std::string junk = dir.file("junk.bin");
  std::ofstream(junk, std::ios::binary) << "not a class file";
  CHECK(run_cli({"diff", junk, junk}).exit_code == 2);
  CHECK(run_cli({"diff", dir.file("missing.class"), junk}).exit_code == 2);
  CHECK(run_cli({"dump", junk}).exit_code == 2);

  // mixing input kinds is a format error
  CliResult mixed = run_cli({"diff", test::fixture_path("Foo_old.class"),
                             test::fixture_path("arch_a.jar")});
  CHECK(mixed.exit_code == 2);

  // a class patch cannot be applied to an archive
  TempDir dir2;
  std::string patch = dir2.file("p.aspa");
  REQUIRE(run_cli({"diff", test::fixture_path("Foo_old.class"), test::fixture_path("Foo_new.class"),
                   "-o", patch})
              .exit_code == 0);
  CHECK(run_cli({"apply", test::fixture_path("arch_a.jar"), patch}).exit_code == 2);
}

TEST_CASE("uncompressed patches decode to the same result") {
  TempDir dir;
  std::string plain = dir.file("plain.aspa");
  std::string packed = dir.file("packed.aspa");
  REQUIRE(run_cli({"diff", test::fixture_path("Foo_old.class"), test::fixture_path("Foo_new.class"),
                   "--no-compress", "-o", plain})
              .exit_code == 0);
  REQUIRE(run_cli({"diff", test::fixture_path("Foo_old.class"), test::fixture_path("Foo_new.class"),
                   "-o", packed})
              .exit_code == 0);
  std::string out_a = dir.file("a.class");
  std::string out_b = dir.file("b.class");
  REQUIRE(run_cli({"apply", test::fixture_path("Foo_old.class"), plain, "-o", out_a}).exit_code == 0);
  REQUIRE(run_cli({"apply", test::fixture_path("Foo_old.class"), packed, "-o", out_b}).exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));  // emit is deterministic, so byte-equal
  Bytes plain_bytes = slurp(plain);
  CHECK(plain_bytes[6] == 0);  // compression byte off
}

TEST_CASE("the thread cap env var does not change results") {
  TempDir dir;
  ArchiveContents arch;
  for (const char* f : {"Foo_old.class", "Zoo.class", "Branchy.class"}) {
    ClassAst c = test::parse_fixture(f);
    arch.classes.emplace(c.class_type, std::move(c));
  }
  Bytes bytes = write_archive(arch);
  std::string jar = dir.file("many.jar");
  std::ofstream(jar, std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());

  std::string p1 = dir.file("one.aspa");
  std::string p2 = dir.file("two.aspa");
  ::setenv("ASPA_THREADS", "1", 1);
  REQUIRE(run_cli({"diff", jar, jar, "-o", p1}).exit_code == 0);
  ::setenv("ASPA_THREADS", "8", 1);
  REQUIRE(run_cli({"diff", jar, jar, "-o", p2}).exit_code == 0);
  ::unsetenv("ASPA_THREADS");
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("diff writes to stdout when no output path is given") {
  CliResult r = run_cli({"diff", test::fixture_path("Foo_old.class"),
                         test::fixture_path("Foo_new.class")});
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.size() > 7);
  CHECK(r.out.substr(0, 4) == "ASPA");
}
