#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "test_support.hpp"

using namespace aspa;
using test::make_class;
using test::make_method;
using test::parse_fixture;

namespace {

/// Counts dump lines whose first non-space character sequence starts with
/// the given mark followed by a space.
std::size_t count_marked_lines(const std::string& dump, char mark) {
  std::size_t count = 0;
  std::istringstream in(dump);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t at = line.find_first_not_of(' ');
    if (at != std::string::npos && line[at] == mark && at + 1 < line.size() && line[at + 1] == ' ')
      ++count;
  }
  return count;
}

struct PatchCounts {
  std::size_t added = 0;    // set members added + sequence items inserted
  std::size_t removed = 0;  // set keys removed + delete ops
};

void count_attr_set(const AttrSetPatch& p, PatchCounts& c);

template <typename T, typename ItemPatch>
void count_seq(const SeqPatch<T, ItemPatch>& p, PatchCounts& c) {
  for (const auto& op : p.ops) {
    if (op.kind == SeqOpKind::Insert) c.added += op.items.size();
    else if (op.kind == SeqOpKind::Delete) c.removed += 1;  // rendered as one line
  }
}

void count_attr_patch(const AttributePatch& p, PatchCounts& c) {
  std::visit(
      [&c](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CodePatch>) {
          count_seq(v.instructions, c);
          count_seq(v.handlers, c);
          count_attr_set(v.attributes, c);
        } else if constexpr (std::is_same_v<T, StringSeqPatch> ||
                             std::is_same_v<T, InnerClassSeqPatch> ||
                             std::is_same_v<T, LineSeqPatch> || std::is_same_v<T, FrameSeqPatch>) {
          count_seq(v, c);
        }
      },
      p.content);
}

void count_attr_set(const AttrSetPatch& p, PatchCounts& c) {
  c.added += p.added.size();
  c.removed += p.removed.size();
  for (const auto& [k, child] : p.patched) count_attr_patch(child, c);
}

PatchCounts expected_counts(const ClassPatch& p) {
  PatchCounts c;
  c.added += p.interfaces.added.size() + p.fields.added.size() + p.methods.added.size() +
             p.constants.added.size();
  c.removed += p.interfaces.removed.size() + p.fields.removed.size() + p.methods.removed.size() +
               p.constants.removed.size();
  for (const auto& [k, child] : p.fields.patched) count_attr_set(child.attributes, c);
  for (const auto& [k, child] : p.methods.patched) count_attr_set(child.attributes, c);
  count_attr_set(p.attributes, c);
  return c;
}

Bytes reencode(const Bytes& encoded) {
  DecodedPatch decoded = decode_patch(encoded);
  if (decoded.is_archive()) return encode_patch(decoded.archive(), false);
  return encode_patch(decoded.class_patch(), decoded.class_name(), false);
}

}  // namespace

TEST_CASE("the identity patch encodes to the hand-computed byte string") {
  // magic 'ASPA' (4) + format version 0x0001 (2) + compression 0x00 (1)
  // + body kind 0x01 (1) + name length 7 (1) + "toy/Foo" (7)
  // + empty mini-pool count 0x0001 (2) + unchanged mark '=' 0x3D (1) = 19 bytes
  Bytes expected = {0x41, 0x53, 0x50, 0x41, 0x00, 0x01, 0x00, 0x01, 0x07, 't',
                    'o',  'y',  '/',  'F',  'o',  'o',  0x00, 0x01, 0x3D};
  ClassPatch unchanged;
  CHECK(encode_patch(unchanged, "toy/Foo", false) == expected);
  // 12 bytes of body never shrink under deflate, so the compressed form
  // falls back to the stored body and stays byte-identical.
  CHECK(encode_patch(unchanged, "toy/Foo", true) == expected);
}

TEST_CASE("encoding is deterministic and decode inverts it") {
  ClassAst old_foo = parse_fixture("Foo_old.class");
  ClassAst new_foo = parse_fixture("Foo_new.class");
  ClassPatch p = diff_class(old_foo, new_foo);

  Bytes once = encode_patch(p, "toy/Foo", false);
  Bytes twice = encode_patch(p, "toy/Foo", false);
  CHECK(once == twice);
  CHECK(reencode(once) == once);

  DecodedPatch decoded = decode_patch(once);
  REQUIRE_FALSE(decoded.is_archive());
  CHECK(decoded.class_name() == "toy/Foo");
  ClassAst applied = apply_patch(decoded.class_patch(), old_foo);
  CHECK(canonical_equal(applied, new_foo));
}

TEST_CASE("compressed and uncompressed forms decode identically") {
  ClassAst old_foo = parse_fixture("Foo_old.class");
  ClassAst new_foo = parse_fixture("Foo_new.class");
  ClassPatch p = diff_class(old_foo, new_foo);
  Bytes stored = encode_patch(p, "toy/Foo", false);
  Bytes deflated = encode_patch(p, "toy/Foo", true);
  CHECK(deflated == encode_patch(p, "toy/Foo", true));
  ClassAst a = apply_patch(decode_patch(stored).class_patch(), old_foo);
  ClassAst b = apply_patch(decode_patch(deflated).class_patch(), old_foo);
  CHECK(canonical_equal(a, b));
}

TEST_CASE("compression wins on repetitive bodies") {
  ClassAst old_ast = make_class("toy/Rep");
  ClassAst new_ast = old_ast;
  for (int i = 0; i < 40; ++i) {
    std::vector<Instruction> body;
    for (int k = 0; k < 30; ++k) {
      body.push_back(Instruction::simple(Opcode::aload_0));
      body.push_back(Instruction::imm(Opcode::sipush, 77));
      body.push_back(Instruction::simple(Opcode::pop));
    }
    body.push_back(Instruction::simple(Opcode::return_));
    new_ast.methods.push_back(
        test::make_method("rep" + std::to_string(i), "()V", 0x0001, std::move(body)));
  }
  complete_constants(new_ast);
  ClassPatch p = diff_class(old_ast, new_ast);
  Bytes stored = encode_patch(p, "toy/Rep", false);
  Bytes deflated = encode_patch(p, "toy/Rep", true);
  REQUIRE(stored.size() > 1024);
  CHECK(deflated.size() < stored.size());
  CHECK(canonical_equal(apply_patch(decode_patch(deflated).class_patch(), old_ast),
                        apply_patch(decode_patch(stored).class_patch(), old_ast)));
}

TEST_CASE("random patches survive an encode/decode round trip byte-exactly") {
  test::Mutator mut(4242);
  std::vector<ClassAst> bases = {parse_fixture("Zoo.class"), parse_fixture("Branchy.class"),
                                 parse_fixture("Foo_new_debug.class")};
  for (int trial = 0; trial < 40; ++trial) {
    const ClassAst& old_ast = bases[trial % bases.size()];
    ClassAst new_ast = mut.mutate(old_ast, 1 + trial % 5);
    ClassPatch p = diff_class(old_ast, new_ast);
    Bytes encoded = encode_patch(p, old_ast.class_type, trial % 2 == 0);
    INFO("trial " << trial);
    DecodedPatch decoded = decode_patch(encoded);
    REQUIRE(canonical_equal(apply_patch(decoded.class_patch(), old_ast), new_ast));
    CHECK(reencode(encoded) == encode_patch(p, old_ast.class_type, false));
  }
}

TEST_CASE("bad patch inputs raise the documented errors") {
  ClassPatch unchanged;
  Bytes good = encode_patch(unchanged, "toy/Foo", false);

  Bytes bad_magic = good;
  bad_magic[0] = 'B';
  try {
    decode_patch(bad_magic);
    FAIL("expected bad magic");
  } catch (const parse_error& e) {
    CHECK(e.code() == errc::bad_magic);
  }

  Bytes bad_version = good;
  bad_version[5] = 9;
  try {
    decode_patch(bad_version);
    FAIL("expected version error");
  } catch (const parse_error& e) {
    CHECK(e.code() == errc::unsupported_format_version);
  }

  Bytes bad_compression = good;
  bad_compression[6] = 7;
  CHECK_THROWS_AS(decode_patch(bad_compression), parse_error);

  Bytes truncated(good.begin(), good.end() - 1);
  try {
    decode_patch(truncated);
    FAIL("expected truncation error");
  } catch (const parse_error& e) {
    CHECK(e.code() == errc::truncated_patch);
  }

  Bytes bad_kind = good;
  bad_kind[7] = 0x33;
  try {
    decode_patch(bad_kind);
    FAIL("expected unknown node tag");
  } catch (const parse_error& e) {
    CHECK(e.code() == errc::unknown_node_tag);
  }

  Bytes trailing = good;
  trailing.push_back(0x00);
  CHECK_THROWS_AS(decode_patch(trailing), parse_error);
}

TEST_CASE("every truncation of a real patch fails loudly") {
  ClassPatch p = diff_class(parse_fixture("Foo_old.class"), parse_fixture("Foo_new.class"));
  Bytes full = encode_patch(p, "toy/Foo", false);
  for (std::size_t cut = 0; cut < full.size(); ++cut) {
    Bytes prefix(full.begin(), full.begin() + cut);
    INFO("cut at " << cut << " of " << full.size());
    CHECK_THROWS_AS(decode_patch(prefix), error);
  }
}

TEST_CASE("an overlong varint is rejected") {
  // valid header, then a name length varint of ten 0xFF bytes
  Bytes data = {0x41, 0x53, 0x50, 0x41, 0x00, 0x01, 0x00, 0x01};
  for (int i = 0; i < 10; ++i) data.push_back(0xFF);
  try {
    decode_patch(data);
    FAIL("expected varint error");
  } catch (const parse_error& e) {
    CHECK(e.code() == errc::bad_varint);
  }
}

TEST_CASE("dump output renders the expected toy patch lines") {
  ClassAst old_foo = parse_fixture("Foo_old.class");
  ClassAst new_foo = parse_fixture("Foo_new.class");
  ClassPatch p = diff_class(old_foo, new_foo);
  std::string text = dump_patch(p, "toy/Foo");

  CHECK(text.find("p toy/Foo {") != std::string::npos);
  CHECK(text.find("p constants {") != std::string::npos);
  CHECK(text.find("p fields {") != std::string::npos);
  CHECK(text.find("p methods {") != std::string::npos);
  CHECK(text.find("p attributes {") != std::string::npos);
  CHECK(text.find("p Code {") != std::string::npos);
  CHECK(text.find("p instructions {") != std::string::npos);

  CHECK(text.find("+ name=y type=int") != std::string::npos);
  CHECK(text.find("- int getX()") != std::string::npos);
  CHECK(text.find("+ void setX(int)") != std::string::npos);
  CHECK(text.find("+ iconst_1") != std::string::npos);
  CHECK(text.find("+ putfield y") != std::string::npos);
  CHECK(text.find("+ utf8 \"y\"") != std::string::npos);
  CHECK(text.find("- utf8 \"getX\"") != std::string::npos);
  CHECK(text.find("p Foo() {") != std::string::npos);  // patched constructor section
  CHECK(text.find("sqX") == std::string::npos);        // untouched method never appears
}

TEST_CASE("dumping an identity patch is a single line") {
  ClassPatch unchanged;
  CHECK(dump_patch(unchanged, "toy/Foo") == "= toy/Foo\n");
}

TEST_CASE("a version-only patch dumps without member sections") {
  ClassPatch p;
  p.version = 51u << 16;
  std::string text = dump_patch(p, "toy/Foo");
  CHECK(text.find("p toy/Foo") != std::string::npos);
  CHECK(text.find("p version 51.0") != std::string::npos);
  CHECK(text.find("p methods") == std::string::npos);
  CHECK(text.find("p fields") == std::string::npos);
  CHECK(text.find("p constants") == std::string::npos);
}

TEST_CASE("dump marks correspond one to one with patch content") {
  test::Mutator mut(555);
  std::vector<ClassAst> bases = {parse_fixture("Zoo.class"), parse_fixture("Foo_old.class")};
  for (int trial = 0; trial < 30; ++trial) {
    const ClassAst& old_ast = bases[trial % bases.size()];
    ClassAst new_ast = mut.mutate(old_ast, 1 + trial % 4);
    ClassPatch p = diff_class(old_ast, new_ast);
    std::string text = dump_patch(p, old_ast.class_type);
    PatchCounts counts = expected_counts(p);
    INFO("trial " << trial << "\n" << text);
    CHECK(count_marked_lines(text, '+') == counts.added);
    CHECK(count_marked_lines(text, '-') == counts.removed);
  }
}

TEST_CASE("patch size tracks the change, not the class size") {
  // one changed instruction in one method: the patch stays small and does
  // not grow when the class gains more unchanged methods
  auto build = [](int methods) {
    ClassAst c = make_class("toy/Sized");
    for (int i = 0; i < methods; ++i) {
      std::vector<Instruction> body;
      for (int k = 0; k < 12; ++k) body.push_back(Instruction::imm(Opcode::sipush, k * 31 + i));
      body.push_back(Instruction::simple(Opcode::return_));
      c.methods.push_back(
          test::make_method("m" + std::to_string(i), "()I", 0x0001, std::move(body)));
    }
    complete_constants(c);
    return c;
  };
  auto mutate_one = [](ClassAst c) {
    for (auto& m : c.methods)
      if (m.signature.name == "m7")
        for (auto& a : m.attributes)
          if (auto* code = std::get_if<CodeAst>(&a.content))
            code->instructions[3] = Instruction::imm(Opcode::sipush, 9999);
    complete_constants(c);
    return c;
  };

  ClassAst small_old = build(200);
  ClassAst small_new = mutate_one(small_old);
  Bytes small_patch = encode_patch(diff_class(small_old, small_new), "toy/Sized", false);
  std::size_t class_size = emit_class(small_old).size();
  CHECK(small_patch.size() * 20 < class_size);  // < 5%

  ClassAst big_old = build(400);
  ClassAst big_new = mutate_one(big_old);
  Bytes big_patch = encode_patch(diff_class(big_old, big_new), "toy/Sized", false);
  CHECK(big_patch.size() <= small_patch.size() + 64);
  CHECK(small_patch.size() <= big_patch.size() + 64);
}

TEST_CASE("patch mini-pools have capacity limits") {
  ClassPatch p;
  for (int i = 0; i < 70000; ++i)
    p.constants.added.push_back(ConstantValue::string_ref("s" + std::to_string(i)));
  try {
    encode_patch(p, "toy/Huge", false);
    FAIL("expected overflow");
  } catch (const emit_error& e) {
    CHECK(e.code() == errc::capacity_overflow);
  }
}

TEST_CASE("standalone added code-level attributes round trip") {
  // a method gains a LineNumberTable: the added attribute must survive the
  // binary patch format even though no byte offsets exist yet
  ClassAst old_ast = parse_fixture("Foo_old.class");
  ClassAst new_ast = old_ast;
  for (auto& m : new_ast.methods) {
    if (m.signature.name != "sqX") continue;
    for (auto& a : m.attributes)
      if (auto* code = std::get_if<CodeAst>(&a.content)) {
        LineNumberTableAttr lnt;
        lnt.lines.push_back(LineEntry{0, 5});
        lnt.lines.push_back(LineEntry{5, 6});
        code->attributes.push_back(AttributeAst{"LineNumberTable", std::move(lnt)});
      }
  }
  complete_constants(new_ast);
  sort_sets(new_ast);
  ClassPatch p = diff_class(old_ast, new_ast);
  Bytes encoded = encode_patch(p, "toy/Foo", false);
  ClassAst applied = apply_patch(decode_patch(encoded).class_patch(), old_ast);
  CHECK(canonical_equal(applied, new_ast));
}

TEST_CASE("patched opaque attributes replace their bytes wholesale") {
  ClassAst old_zoo = parse_fixture("Zoo.class");
  ClassAst new_zoo = old_zoo;
  for (auto& a : new_zoo.attributes)
    if (a.name == "X-Custom") std::get<OpaqueAttr>(a.content).bytes = {9, 9, 9};
  ClassPatch p = diff_class(old_zoo, new_zoo);
  REQUIRE(p.attributes.patched.size() == 1);
  Bytes encoded = encode_patch(p, "toy/Zoo", false);
  ClassAst applied = apply_patch(decode_patch(encoded).class_patch(), old_zoo);
  CHECK(canonical_equal(applied, new_zoo));
}
