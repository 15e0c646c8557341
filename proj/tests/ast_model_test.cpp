#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "test_support.hpp"

using namespace aspa;
using test::make_class;
using test::make_field;
using test::make_method;
using test::parse_fixture;

TEST_CASE("canonical equality is reflexive on parsed classes") {
  ClassAst foo = parse_fixture("Foo_old.class");
  CHECK(canonical_equal(foo, foo));
  ClassAst again = parse_fixture("Foo_old.class");
  CHECK(canonical_equal(foo, again));
}

TEST_CASE("definition order and pool order are factored out") {
  ClassAst foo = parse_fixture("Foo_old.class");
  ClassAst permuted = parse_fixture("Foo_old_permuted.class");
  CHECK(canonical_equal(foo, permuted));
  CHECK(canonical_equal(parse_fixture("Zoo.class"), parse_fixture("Zoo_permuted.class")));
  CHECK(canonical_equal(parse_fixture("Branchy.class"), parse_fixture("Branchy_permuted.class")));
}

TEST_CASE("different versions of the same class are not equal") {
  CHECK_FALSE(canonical_equal(parse_fixture("Foo_old.class"), parse_fixture("Foo_new.class")));
}

TEST_CASE("canonical equality ignores in-memory member order") {
  ClassAst foo = parse_fixture("Zoo.class");
  ClassAst shuffled = foo;
  std::mt19937 rng(7);
  std::shuffle(shuffled.fields.begin(), shuffled.fields.end(), rng);
  std::shuffle(shuffled.methods.begin(), shuffled.methods.end(), rng);
  std::shuffle(shuffled.constants.begin(), shuffled.constants.end(), rng);
  std::shuffle(shuffled.interfaces.begin(), shuffled.interfaces.end(), rng);
  CHECK(canonical_equal(foo, shuffled));
}

TEST_CASE("method keys are full signatures") {
  ClassAst foo = parse_fixture("Foo_old.class");
  auto it = std::find_if(foo.methods.begin(), foo.methods.end(),
                         [](const MethodAst& m) { return m.signature.name == "sqX"; });
  REQUIRE(it != foo.methods.end());
  const Signature& key = key_of(*it);
  CHECK(key.name == "sqX");
  CHECK(key.return_type == JavaType::primitive(BaseType::Int));
  CHECK(key.args.empty());
  CHECK(key.pretty() == "int sqX()");
  CHECK(key.method_descriptor() == "()I");
}

TEST_CASE("field and attribute keys are names, constant keys are values") {
  FieldAst f = make_field("x", JavaType::primitive(BaseType::Int));
  CHECK(key_of(f) == "x");
  AttributeAst a{"SourceFile", SourceFileAttr{"Foo.java"}};
  CHECK(key_of(a) == "SourceFile");
  ConstantValue c = ConstantValue::utf8("setX");
  CHECK(key_of(c) == c);
  CHECK(key_of(c).tag == ConstantValue::Tag::Utf8);
  CHECK(key_of(c).text == "setX");
  // distinct tags with the same payload are distinct keys
  CHECK_FALSE(ConstantValue::utf8("setX") == ConstantValue::string_ref("setX"));
}

TEST_CASE("float constants compare by bit pattern") {
  ConstantValue nan1 = ConstantValue::float_bits(0x7FC00001);
  ConstantValue nan2 = ConstantValue::float_bits(0x7FC00002);
  CHECK_FALSE(nan1 == nan2);
  CHECK(nan1 == ConstantValue::float_bits(0x7FC00001));
  CHECK_FALSE(ConstantValue::double_bits(0x8000000000000000ull) ==
              ConstantValue::double_bits(0));  // -0.0 vs +0.0
}

TEST_CASE("well-formed fixtures validate cleanly") {
  for (const char* name : {"Foo_old.class", "Foo_new.class", "Foo_old_debug.class",
                           "Foo_new_debug.class", "Zoo.class", "Branchy.class"}) {
    ClassAst c = parse_fixture(name);
    INFO(name);
    CHECK(validate(c).empty());
  }
}

TEST_CASE("duplicate field keys are reported") {
  ClassAst c = make_class("toy/Dup");
  c.fields.push_back(make_field("x", JavaType::primitive(BaseType::Int)));
  c.fields.push_back(make_field("x", JavaType::primitive(BaseType::Long)));
  complete_constants(c);
  auto violations = validate(c);
  REQUIRE_FALSE(violations.empty());
  CHECK(std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.path == "fields" && v.message.find("duplicate") != std::string::npos;
  }));
}

TEST_CASE("dangling branch targets are reported") {
  ClassAst c = make_class("toy/Dangle");
  std::vector<Instruction> body;
  for (int i = 0; i < 9; ++i) body.push_back(Instruction::simple(Opcode::nop));
  body.push_back(Instruction::branch(Opcode::goto_, 99));
  c.methods.push_back(make_method("run", "()V", 0x0009, std::move(body)));
  complete_constants(c);
  auto violations = validate(c);
  REQUIRE_FALSE(violations.empty());
  CHECK(std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.message.find("dangling branch target") != std::string::npos;
  }));
}

TEST_CASE("missing closure constants are reported") {
  ClassAst c = make_class("toy/Sparse");
  complete_constants(c);
  REQUIRE(validate(c).empty());
  // drop the utf8 for the class name
  std::erase_if(c.constants, [&](const ConstantValue& cv) {
    return cv.tag == ConstantValue::Tag::Utf8 && cv.text == "toy/Sparse";
  });
  auto violations = validate(c);
  REQUIRE_FALSE(violations.empty());
  CHECK(violations.front().path == "constants");
}

TEST_CASE("abstract methods must not carry code") {
  ClassAst c = make_class("toy/Abs");
  MethodAst m = make_method("run", "()V", 0x0401, {Instruction::simple(Opcode::return_)});
  c.methods.push_back(std::move(m));
  complete_constants(c);
  auto violations = validate(c);
  CHECK(std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.message.find("abstract/native") != std::string::npos;
  }));
}

TEST_CASE("superclass may be absent only for java/lang/Object") {
  ClassAst c = make_class("toy/NoSuper");
  c.superclass.reset();
  complete_constants(c);
  CHECK_FALSE(validate(c).empty());

  ClassAst object;
  object.class_type = "java/lang/Object";
  object.version = 49u << 16;
  object.flags = 0x0021;
  complete_constants(object);
  CHECK(validate(object).empty());
}

TEST_CASE("key uniqueness holds for every parsed set") {
  for (const char* name : {"Foo_old.class", "Zoo.class", "Branchy.class"}) {
    ClassAst c = parse_fixture(name);
    auto unique_by = [](auto view) {
      for (std::size_t i = 1; i < view.size(); ++i)
        if (!key_less(*view[i - 1], *view[i])) return false;
      return true;
    };
    INFO(name);
    CHECK(unique_by(detail::sorted_view(c.fields)));
    CHECK(unique_by(detail::sorted_view(c.methods)));
    CHECK(unique_by(detail::sorted_view(c.constants)));
    CHECK(unique_by(detail::sorted_view(c.attributes)));
    CHECK(unique_by(detail::sorted_view(c.interfaces)));
  }
}

TEST_CASE("equality is an equivalence relation on randomized classes") {
  test::Mutator mut(1234);
  ClassAst base = parse_fixture("Zoo.class");
  std::vector<ClassAst> pool;
  pool.push_back(base);
  for (int i = 0; i < 8; ++i) pool.push_back(mut.mutate(base, 3));
  for (const auto& a : pool) {
    CHECK(canonical_equal(a, a));  // reflexive
    for (const auto& b : pool) {
      CHECK(canonical_equal(a, b) == canonical_equal(b, a));  // symmetric
      for (const auto& c : pool)
        if (canonical_equal(a, b) && canonical_equal(b, c))
          CHECK(canonical_equal(a, c));  // transitive
    }
  }
}

TEST_CASE("validate is total and never throws on malformed input") {
  ClassAst c;  // empty class name, missing superclass
  auto violations = validate(c);
  CHECK_FALSE(violations.empty());
}
