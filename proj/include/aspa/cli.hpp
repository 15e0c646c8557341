#ifndef ASPA_CLI_HPP
#define ASPA_CLI_HPP

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aspa/archive.hpp"
#include "aspa/classfile_read.hpp"
#include "aspa/classfile_write.hpp"
#include "aspa/diff.hpp"
#include "aspa/error.hpp"
#include "aspa/patch_dump.hpp"
#include "aspa/patch_io.hpp"

namespace aspa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFormat = 2;
inline constexpr int kExitMismatch = 3;

enum class InputKind { ClassFile, Archive };

namespace detail {

inline Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error(errc::io_error, "cannot open " + path);
  return Bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

inline void write_output(const Bytes& data, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw error(errc::io_error, "cannot write " + out_path);
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw error(errc::io_error, "short write to " + out_path);
}

inline InputKind detect_kind(const Bytes& data, const std::string& path) {
  if (data.size() >= 4 && data[0] == 0xCA && data[1] == 0xFE && data[2] == 0xBA && data[3] == 0xBE)
    return InputKind::ClassFile;
  if (data.size() >= 2 && data[0] == 'P' && data[1] == 'K') return InputKind::Archive;
  throw error(errc::io_error, path + ": neither a class file nor an archive (by magic bytes)");
}

inline unsigned env_threads() {
  const char* v = std::getenv("ASPA_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  unsigned long n = std::strtoul(v, &end, 10);
  if (end == v || *end != '\0') return 0;
  return static_cast<unsigned>(n);
}

}  // namespace detail

/// Runs the command line: diff, apply, dump, stats. `args` excludes the
/// program name and is in natural order. Returns the process exit code
/// (0 ok, 1 usage, 2 parse/format, 3 patch mismatch).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  std::reverse(args.begin(), args.end());  // CLI11's vector overload pops from the back
  CLI::App app{"AST-level diff and patch for compiled JVM classes and archives", "aspa"};
  app.require_subcommand(1);

  std::string diff_old, diff_new, diff_out;
  bool diff_no_compress = false;
  auto* diff_cmd = app.add_subcommand("diff", "Derive a patch between two versions");
  diff_cmd->add_option("old", diff_old, "old class file or archive")->required();
  diff_cmd->add_option("new", diff_new, "new class file or archive")->required();
  diff_cmd->add_option("-o,--output", diff_out, "patch output path (default: stdout)");
  diff_cmd->add_flag("--no-compress", diff_no_compress, "store the patch body uncompressed");

  std::string apply_base, apply_patch_path, apply_out;
  auto* apply_cmd = app.add_subcommand("apply", "Apply a patch to the old version");
  apply_cmd->add_option("base", apply_base, "old class file or archive")->required();
  apply_cmd->add_option("patch", apply_patch_path, "patch file")->required();
  apply_cmd->add_option("-o,--output", apply_out, "output path (default: stdout)");

  std::string dump_path;
  auto* dump_cmd = app.add_subcommand("dump", "Render a patch as readable text");
  dump_cmd->add_option("patch", dump_path, "patch file")->required();

  std::string stats_old, stats_new, stats_format = "text";
  bool stats_no_compress = false;
  auto* stats_cmd = app.add_subcommand("stats", "Count patched/added/removed classes");
  stats_cmd->add_option("old", stats_old, "old class file or archive")->required();
  stats_cmd->add_option("new", stats_new, "new class file or archive")->required();
  stats_cmd->add_option("--format", stats_format, "text or tsv")
      ->check(CLI::IsMember({"text", "tsv"}));
  stats_cmd->add_flag("--no-compress", stats_no_compress, "measure the uncompressed patch");

  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  unsigned threads = detail::env_threads();
  try {
    if (*diff_cmd) {
      Bytes old_bytes = detail::read_file(diff_old);
      Bytes new_bytes = detail::read_file(diff_new);
      InputKind old_kind = detail::detect_kind(old_bytes, diff_old);
      InputKind new_kind = detail::detect_kind(new_bytes, diff_new);
      if (old_kind != new_kind)
        throw error(errc::io_error, "cannot diff a class file against an archive");
      Bytes patch_bytes;
      if (old_kind == InputKind::ClassFile) {
        ClassAst old_ast = parse_class(old_bytes);
        ClassAst new_ast = parse_class(new_bytes);
        patch_bytes = encode_patch(diff_class(old_ast, new_ast), old_ast.class_type,
                                   !diff_no_compress);
      } else {
        ArchiveContents old_arch = read_archive(old_bytes, threads);
        ArchiveContents new_arch = read_archive(new_bytes, threads);
        patch_bytes = encode_patch(diff_archive(old_arch, new_arch, threads), !diff_no_compress);
      }
      detail::write_output(patch_bytes, diff_out, out);
    } else if (*apply_cmd) {
      Bytes base_bytes = detail::read_file(apply_base);
      Bytes patch_bytes = detail::read_file(apply_patch_path);
      DecodedPatch patch = decode_patch(patch_bytes);
      InputKind base_kind = detail::detect_kind(base_bytes, apply_base);
      Bytes result;
      if (patch.is_archive()) {
        if (base_kind != InputKind::Archive)
          throw error(errc::io_error, "archive patch applied to a non-archive input");
        ArchiveContents base = read_archive(base_bytes, threads);
        result = write_archive(apply_archive_patch(patch.archive(), base, threads), threads);
      } else {
        if (base_kind != InputKind::ClassFile)
          throw error(errc::io_error, "class patch applied to a non-class input");
        ClassAst base = parse_class(base_bytes);
        result = emit_class(apply_patch(patch.class_patch(), base));
      }
      detail::write_output(result, apply_out, out);
    } else if (*dump_cmd) {
      DecodedPatch patch = decode_patch(detail::read_file(dump_path));
      if (patch.is_archive()) out << dump_patch(patch.archive());
      else out << dump_patch(patch.class_patch(), patch.class_name());
    } else if (*stats_cmd) {
      Bytes old_bytes = detail::read_file(stats_old);
      Bytes new_bytes = detail::read_file(stats_new);
      InputKind old_kind = detail::detect_kind(old_bytes, stats_old);
      InputKind new_kind = detail::detect_kind(new_bytes, stats_new);
      if (old_kind != new_kind)
        throw error(errc::io_error, "cannot diff a class file against an archive");
      ArchivePatch patch;
      if (old_kind == InputKind::ClassFile) {
        ClassAst old_ast = parse_class(old_bytes);
        ClassAst new_ast = parse_class(new_bytes);
        ClassPatch cp = diff_class(old_ast, new_ast);
        if (!cp.unchanged()) patch.patched.emplace(old_ast.class_type, std::move(cp));
      } else {
        patch = diff_archive(read_archive(old_bytes, threads), read_archive(new_bytes, threads),
                             threads);
      }
      ArchiveStats stats = archive_stats(patch);
      std::size_t bytes = encode_patch(patch, !stats_no_compress).size();
      if (stats_format == "tsv") {
        out << "p\t+\t-\ttotal\tbytes\n"
            << stats.patched << '\t' << stats.added << '\t' << stats.removed << '\t' << stats.total
            << '\t' << bytes << '\n';
      } else {
        out << "patched: " << stats.patched << "\nadded:   " << stats.added
            << "\nremoved: " << stats.removed << "\ntotal:   " << stats.total
            << "\npatch:   " << bytes << " bytes\n";
      }
    }
  } catch (const patch_error& e) {
    err << "aspa: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const error& e) {
    err << "aspa: " << e.what() << '\n';
    return kExitFormat;
  }
  return kExitOk;
}

}  // namespace aspa::cli

#endif  // ASPA_CLI_HPP
