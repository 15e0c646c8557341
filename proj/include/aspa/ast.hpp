#ifndef ASPA_AST_HPP
#define ASPA_AST_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "aspa/constant.hpp"
#include "aspa/instruction.hpp"
#include "aspa/java_type.hpp"

namespace aspa {

// Access flag masks used by checks below.
inline constexpr std::uint16_t kAccNative = 0x0100;
inline constexpr std::uint16_t kAccAbstract = 0x0400;

struct AttributeAst;

/// Exception-table row. `start`/`handler` are instruction indices; `end` is
/// exclusive and may equal the instruction count ("covers to end of code").
struct ExceptionHandler {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  std::uint32_t handler = 0;
  std::optional<std::string> catch_type;  // absent = catch-all
  bool operator==(const ExceptionHandler&) const = default;
};

struct CodeAst {
  std::uint16_t max_stack = 0;
  std::uint16_t max_locals = 0;
  std::vector<Instruction> instructions;
  std::vector<ExceptionHandler> handlers;
  std::vector<AttributeAst> attributes;  // set keyed by name
};

struct ExceptionsAttr {
  std::vector<std::string> types;  // declared thrown classes, in file order
  bool operator==(const ExceptionsAttr&) const = default;
};

struct ConstantValueAttr {
  ConstantValue value;
  bool operator==(const ConstantValueAttr&) const = default;
};

struct SourceFileAttr {
  std::string file;
  bool operator==(const SourceFileAttr&) const = default;
};

struct SignatureAttr {
  std::string signature;
  bool operator==(const SignatureAttr&) const = default;
};

struct InnerClassRow {
  std::optional<std::string> inner;
  std::optional<std::string> outer;
  std::optional<std::string> inner_name;
  std::uint16_t flags = 0;
  bool operator==(const InnerClassRow&) const = default;
};

struct InnerClassesAttr {
  std::vector<InnerClassRow> rows;
  bool operator==(const InnerClassesAttr&) const = default;
};

struct LineEntry {
  std::uint32_t instruction = 0;
  std::uint32_t line = 0;
  bool operator==(const LineEntry&) const = default;
};

struct LineNumberTableAttr {
  std::vector<LineEntry> lines;
  bool operator==(const LineNumberTableAttr&) const = default;
};

struct VerificationType {
  enum class Kind : std::uint8_t {
    Top = 0,
    Integer = 1,
    Float = 2,
    Double = 3,
    Long = 4,
    Null = 5,
    UninitializedThis = 6,
    Object = 7,
    Uninitialized = 8,
  };
  Kind kind = Kind::Top;
  std::string class_name;                // Object
  std::uint32_t new_instruction = 0;     // Uninitialized: index of the `new` instruction
  bool operator==(const VerificationType&) const = default;
};

struct StackMapFrame {
  enum class Kind : std::uint8_t { Same, SameLocals1, Chop, Append, Full };
  Kind kind = Kind::Same;
  std::uint32_t at_instruction = 0;
  std::uint8_t chop_count = 0;               // Chop: 1..3
  std::vector<VerificationType> locals;      // Append: appended; Full: all
  std::vector<VerificationType> stack;       // SameLocals1: exactly one; Full: all
  bool operator==(const StackMapFrame&) const = default;
};

struct StackMapTableAttr {
  std::vector<StackMapFrame> frames;
  bool operator==(const StackMapTableAttr&) const = default;
};

/// Zero-length marker attributes (Deprecated, Synthetic).
struct FlagAttr {
  bool operator==(const FlagAttr&) const = default;
};

struct OpaqueAttr {
  std::vector<std::uint8_t> bytes;
  bool operator==(const OpaqueAttr&) const = default;
};

using AttributeContent =
    std::variant<CodeAst, ExceptionsAttr, ConstantValueAttr, SourceFileAttr, SignatureAttr,
                 InnerClassesAttr, LineNumberTableAttr, StackMapTableAttr, FlagAttr, OpaqueAttr>;

struct AttributeAst {
  std::string name;  // KEY
  AttributeContent content;
};

struct FieldAst {
  std::string name;  // KEY
  JavaType type;
  std::uint16_t flags = 0;
  std::vector<AttributeAst> attributes;  // set keyed by name
};

struct MethodAst {
  Signature signature;  // KEY
  std::uint16_t flags = 0;
  std::vector<AttributeAst> attributes;  // set keyed by name

  const CodeAst* code() const;
};

/// Canonical AST of one class. The members declared as sets (interfaces,
/// fields, methods, constants, attributes) are stored sorted by key; parsing
/// and the test builders establish that order, so definition order in a
/// class file never shows through.
struct ClassAst {
  std::string class_type;                  // binary name, e.g. "toy/Foo"
  std::optional<std::string> superclass;   // absent only for java/lang/Object
  std::vector<std::string> interfaces;     // set
  std::vector<FieldAst> fields;            // set keyed by name
  std::vector<MethodAst> methods;          // set keyed by signature
  std::vector<ConstantValue> constants;    // set keyed by (tag, payload)
  std::vector<AttributeAst> attributes;    // set keyed by name
  std::uint32_t version = 0;               // major << 16 | minor
  std::uint16_t flags = 0;

  std::uint16_t major_version() const noexcept { return static_cast<std::uint16_t>(version >> 16); }
  std::uint16_t minor_version() const noexcept { return static_cast<std::uint16_t>(version); }
};

// ----- keys ---------------------------------------------------------------

inline const std::string& key_of(const FieldAst& f) { return f.name; }
inline const Signature& key_of(const MethodAst& m) { return m.signature; }
inline const std::string& key_of(const AttributeAst& a) { return a.name; }
inline const ConstantValue& key_of(const ConstantValue& c) { return c; }
inline const std::string& key_of(const std::string& iface) { return iface; }

inline bool key_less(const FieldAst& a, const FieldAst& b) { return a.name < b.name; }
inline bool key_less(const MethodAst& a, const MethodAst& b) {
  return signature_less(a.signature, b.signature);
}
inline bool key_less(const AttributeAst& a, const AttributeAst& b) { return a.name < b.name; }
inline bool key_less(const ConstantValue& a, const ConstantValue& b) { return a < b; }
inline bool key_less(const std::string& a, const std::string& b) { return a < b; }

inline bool key_equal(const FieldAst& a, const FieldAst& b) { return a.name == b.name; }
inline bool key_equal(const MethodAst& a, const MethodAst& b) { return a.signature == b.signature; }
inline bool key_equal(const AttributeAst& a, const AttributeAst& b) { return a.name == b.name; }
inline bool key_equal(const ConstantValue& a, const ConstantValue& b) { return a == b; }
inline bool key_equal(const std::string& a, const std::string& b) { return a == b; }

// ----- attribute kinds ----------------------------------------------------

enum class AttrContext : std::uint8_t { Class, Field, Method, Code };

enum class AttrKind : std::uint8_t {
  Code,
  Exceptions,
  ConstVal,
  SourceFile,
  Signature,
  InnerClasses,
  LineNumberTable,
  StackMapTable,
  Flag,
  Opaque,
};

/// Which structured form an attribute named `name` takes in context `ctx`.
/// Known names outside their defining context stay Opaque.
inline AttrKind attribute_kind(std::string_view name, AttrContext ctx) {
  if (name == "Code" && ctx == AttrContext::Method) return AttrKind::Code;
  if (name == "Exceptions" && ctx == AttrContext::Method) return AttrKind::Exceptions;
  if (name == "ConstantValue" && ctx == AttrContext::Field) return AttrKind::ConstVal;
  if (name == "SourceFile" && ctx == AttrContext::Class) return AttrKind::SourceFile;
  if (name == "Signature") return AttrKind::Signature;
  if (name == "InnerClasses" && ctx == AttrContext::Class) return AttrKind::InnerClasses;
  if (name == "LineNumberTable" && ctx == AttrContext::Code) return AttrKind::LineNumberTable;
  if (name == "StackMapTable" && ctx == AttrContext::Code) return AttrKind::StackMapTable;
  if (name == "Deprecated" || name == "Synthetic") return AttrKind::Flag;
  return AttrKind::Opaque;
}

inline AttrKind content_kind(const AttributeContent& c) {
  return std::visit(
      [](const auto& v) -> AttrKind {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CodeAst>) return AttrKind::Code;
        else if constexpr (std::is_same_v<T, ExceptionsAttr>) return AttrKind::Exceptions;
        else if constexpr (std::is_same_v<T, ConstantValueAttr>) return AttrKind::ConstVal;
        else if constexpr (std::is_same_v<T, SourceFileAttr>) return AttrKind::SourceFile;
        else if constexpr (std::is_same_v<T, SignatureAttr>) return AttrKind::Signature;
        else if constexpr (std::is_same_v<T, InnerClassesAttr>) return AttrKind::InnerClasses;
        else if constexpr (std::is_same_v<T, LineNumberTableAttr>) return AttrKind::LineNumberTable;
        else if constexpr (std::is_same_v<T, StackMapTableAttr>) return AttrKind::StackMapTable;
        else if constexpr (std::is_same_v<T, FlagAttr>) return AttrKind::Flag;
        else return AttrKind::Opaque;
      },
      c);
}

inline const CodeAst* MethodAst::code() const {
  for (const auto& a : attributes)
    if (a.name == "Code")
      if (const auto* c = std::get_if<CodeAst>(&a.content)) return c;
  return nullptr;
}

// ----- canonical equality ---------------------------------------------------

namespace detail {

template <typename T>
std::vector<const T*> sorted_view(const std::vector<T>& v) {
  std::vector<const T*> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(&e);
  std::sort(out.begin(), out.end(), [](const T* a, const T* b) { return key_less(*a, *b); });
  return out;
}

template <typename T, typename Eq>
bool set_equal(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  auto va = sorted_view(a);
  auto vb = sorted_view(b);
  for (std::size_t i = 0; i < va.size(); ++i)
    if (!eq(*va[i], *vb[i])) return false;
  return true;
}

bool attr_equal(const AttributeAst& a, const AttributeAst& b);

inline bool attr_set_equal(const std::vector<AttributeAst>& a, const std::vector<AttributeAst>& b) {
  return set_equal(a, b, [](const AttributeAst& x, const AttributeAst& y) { return attr_equal(x, y); });
}

inline bool code_equal(const CodeAst& a, const CodeAst& b) {
  return a.max_stack == b.max_stack && a.max_locals == b.max_locals &&
         a.instructions == b.instructions && a.handlers == b.handlers &&
         attr_set_equal(a.attributes, b.attributes);
}

inline bool attr_equal(const AttributeAst& a, const AttributeAst& b) {
  if (a.name != b.name) return false;
  if (a.content.index() != b.content.index()) return false;
  if (const auto* ca = std::get_if<CodeAst>(&a.content))
    return code_equal(*ca, std::get<CodeAst>(b.content));
  return std::visit(
      [&b](const auto& va) -> bool {
        using T = std::decay_t<decltype(va)>;
        if constexpr (std::is_same_v<T, CodeAst>) {
          return false;  // handled above
        } else {
          return va == std::get<T>(b.content);
        }
      },
      a.content);
}

inline bool field_equal(const FieldAst& a, const FieldAst& b) {
  return a.name == b.name && a.type == b.type && a.flags == b.flags &&
         attr_set_equal(a.attributes, b.attributes);
}

inline bool method_equal(const MethodAst& a, const MethodAst& b) {
  return a.signature == b.signature && a.flags == b.flags && attr_set_equal(a.attributes, b.attributes);
}

}  // namespace detail

/// AST-level equality: set members compare as sets (order-free), sequences
/// elementwise, terminals deeply. This is the correctness relation the whole
/// pipeline preserves.
inline bool canonical_equal(const ClassAst& a, const ClassAst& b) {
  using namespace detail;
  return a.class_type == b.class_type && a.superclass == b.superclass && a.version == b.version &&
         a.flags == b.flags &&
         set_equal(a.interfaces, b.interfaces, [](const std::string& x, const std::string& y) { return x == y; }) &&
         set_equal(a.fields, b.fields, [](const FieldAst& x, const FieldAst& y) { return field_equal(x, y); }) &&
         set_equal(a.methods, b.methods, [](const MethodAst& x, const MethodAst& y) { return method_equal(x, y); }) &&
         set_equal(a.constants, b.constants, [](const ConstantValue& x, const ConstantValue& y) { return x == y; }) &&
         attr_set_equal(a.attributes, b.attributes);
}

inline bool canonical_equal(const MethodAst& a, const MethodAst& b) { return detail::method_equal(a, b); }
inline bool canonical_equal(const FieldAst& a, const FieldAst& b) { return detail::field_equal(a, b); }
inline bool canonical_equal(const AttributeAst& a, const AttributeAst& b) { return detail::attr_equal(a, b); }
inline bool canonical_equal(const CodeAst& a, const CodeAst& b) { return detail::code_equal(a, b); }

// ----- canonical ordering ---------------------------------------------------

namespace detail {

template <typename T>
void sort_unique_by_key(std::vector<T>& v) {
  std::stable_sort(v.begin(), v.end(), [](const T& a, const T& b) { return key_less(a, b); });
  v.erase(std::unique(v.begin(), v.end(), [](const T& a, const T& b) { return key_equal(a, b); }),
          v.end());
}

inline void sort_attribute_sets(std::vector<AttributeAst>& attrs) {
  for (auto& a : attrs)
    if (auto* code = std::get_if<CodeAst>(&a.content)) sort_attribute_sets(code->attributes);
  sort_unique_by_key(attrs);
}

}  // namespace detail

/// Puts every set attribute into sorted-by-key order (dropping duplicate
/// keys, first occurrence wins). Parsing always produces this form; builders
/// of hand-made ASTs should call it once at the end.
inline void sort_sets(ClassAst& c) {
  detail::sort_unique_by_key(c.interfaces);
  for (auto& f : c.fields) detail::sort_attribute_sets(f.attributes);
  detail::sort_unique_by_key(c.fields);
  for (auto& m : c.methods) detail::sort_attribute_sets(m.attributes);
  detail::sort_unique_by_key(c.methods);
  detail::sort_unique_by_key(c.constants);
  detail::sort_attribute_sets(c.attributes);
}

// ----- constant closure -----------------------------------------------------

namespace detail {

class ConstantCollector {
 public:
  void add(const ConstantValue& c) {
    auto [it, inserted] = seen_.insert(c);
    if (!inserted) return;
    for (const auto& dep : c.components()) add(dep);
  }

  void add_utf8(const std::string& s) { add(ConstantValue::utf8(s)); }
  void add_class(const std::string& name) { add(ConstantValue::class_ref(name)); }

  void add_instruction(const Instruction& in) {
    switch (operand_kind(in.op)) {
      case OperandKind::Const:
      case OperandKind::DynamicRef:
        add(std::get<ConstantValue>(in.operand));
        break;
      case OperandKind::FieldRef:
        add_member(ConstantValue::Tag::FieldRef, std::get<MemberRef>(in.operand));
        break;
      case OperandKind::MethodRef:
        add_member(ConstantValue::Tag::MethodRef, std::get<MemberRef>(in.operand));
        break;
      case OperandKind::InterfaceRef:
        add_member(ConstantValue::Tag::InterfaceMethodRef, std::get<MemberRef>(in.operand));
        break;
      case OperandKind::Type:
        add_class(std::get<TypeRef>(in.operand).name);
        break;
      case OperandKind::MultiArray:
        add_class(std::get<MultiArrayArgs>(in.operand).name);
        break;
      default:
        break;
    }
  }

  void add_attribute(const AttributeAst& a) {
    add_utf8(a.name);
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, CodeAst>) {
            for (const auto& in : v.instructions) add_instruction(in);
            for (const auto& h : v.handlers)
              if (h.catch_type) add_class(*h.catch_type);
            for (const auto& sub : v.attributes) add_attribute(sub);
          } else if constexpr (std::is_same_v<T, ExceptionsAttr>) {
            for (const auto& name : v.types) add_class(name);
          } else if constexpr (std::is_same_v<T, ConstantValueAttr>) {
            add(v.value);
          } else if constexpr (std::is_same_v<T, SourceFileAttr>) {
            add_utf8(v.file);
          } else if constexpr (std::is_same_v<T, SignatureAttr>) {
            add_utf8(v.signature);
          } else if constexpr (std::is_same_v<T, InnerClassesAttr>) {
            for (const auto& row : v.rows) {
              if (row.inner) add_class(*row.inner);
              if (row.outer) add_class(*row.outer);
              if (row.inner_name) add_utf8(*row.inner_name);
            }
          } else if constexpr (std::is_same_v<T, StackMapTableAttr>) {
            for (const auto& frame : v.frames) {
              for (const auto& vt : frame.locals)
                if (vt.kind == VerificationType::Kind::Object) add_class(vt.class_name);
              for (const auto& vt : frame.stack)
                if (vt.kind == VerificationType::Kind::Object) add_class(vt.class_name);
            }
          }
          // LineNumberTable, FlagAttr, OpaqueAttr: name only.
        },
        a.content);
  }

  void add_field(const FieldAst& f) {
    add_utf8(f.name);
    add_utf8(f.type.descriptor());
    for (const auto& a : f.attributes) add_attribute(a);
  }

  void add_method(const MethodAst& m) {
    add_utf8(m.signature.name);
    add_utf8(m.signature.method_descriptor());
    for (const auto& a : m.attributes) add_attribute(a);
  }

  std::set<ConstantValue> take() { return std::move(seen_); }

 private:
  void add_member(ConstantValue::Tag tag, const MemberRef& r) {
    add(ConstantValue::member_ref(tag, r.owner, r.name, r.descriptor));
  }

  std::set<ConstantValue> seen_;
};

}  // namespace detail

namespace detail {

inline void collect_structure_refs(const ClassAst& c, ConstantCollector& col) {
  col.add_class(c.class_type);
  if (c.superclass) col.add_class(*c.superclass);
  for (const auto& i : c.interfaces) col.add_class(i);
  for (const auto& f : c.fields) col.add_field(f);
  for (const auto& m : c.methods) col.add_method(m);
  for (const auto& a : c.attributes) col.add_attribute(a);
}

}  // namespace detail

/// Every constant the class structurally refers to, closed over pool-entry
/// components (a member ref pulls in its class, name-and-type and utf8s).
inline std::set<ConstantValue> required_constants(const ClassAst& c) {
  detail::ConstantCollector col;
  detail::collect_structure_refs(c, col);
  return col.take();
}

/// The full pool a serialization of this class needs: declared constants
/// plus structural references, closed over components.
inline std::set<ConstantValue> pool_closure(const ClassAst& c) {
  detail::ConstantCollector col;
  detail::collect_structure_refs(c, col);
  for (const auto& cv : c.constants) col.add(cv);
  return col.take();
}

/// Extends `constants` so the closure invariant holds. Handy when building
/// ASTs by hand; parsed classes already satisfy it.
inline void complete_constants(ClassAst& c) {
  auto needed = pool_closure(c);
  std::set<ConstantValue> declared(c.constants.begin(), c.constants.end());
  for (const auto& n : needed)
    if (!declared.count(n)) c.constants.push_back(n);
  detail::sort_unique_by_key(c.constants);
}

// ----- validation -----------------------------------------------------------

struct Violation {
  std::string path;
  std::string message;
};

inline bool valid_binary_class_name(std::string_view name) {
  if (name.empty()) return false;
  std::size_t start = 0;
  while (true) {
    std::size_t slash = name.find('/', start);
    std::string_view seg = name.substr(start, slash == std::string_view::npos ? slash : slash - start);
    if (seg.empty()) return false;
    for (char ch : seg)
      if (ch == '.' || ch == ';' || ch == '[') return false;
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return true;
}

namespace detail {

class Validator {
 public:
  explicit Validator(const ClassAst& c) : class_(c) {}

  std::vector<Violation> run() {
    check_names();
    check_set_keys();
    for (const auto& f : class_.fields) check_field(f);
    for (const auto& m : class_.methods) check_method(m);
    for (const auto& a : class_.attributes) check_attribute(a, AttrContext::Class, "attributes");
    check_closure();
    return std::move(out_);
  }

 private:
  void fail(std::string path, std::string message) {
    out_.push_back(Violation{std::move(path), std::move(message)});
  }

  void check_names() {
    if (!valid_binary_class_name(class_.class_type))
      fail("class_type", "not a valid binary class name: '" + class_.class_type + "'");
    if (class_.superclass) {
      if (!valid_binary_class_name(*class_.superclass))
        fail("superclass", "not a valid binary class name: '" + *class_.superclass + "'");
    } else if (class_.class_type != "java/lang/Object") {
      fail("superclass", "only java/lang/Object may omit its superclass");
    }
    for (const auto& i : class_.interfaces)
      if (!valid_binary_class_name(i)) fail("interfaces", "invalid interface name: '" + i + "'");
  }

  template <typename T>
  void check_unique(const std::vector<T>& v, const char* path, const char* what) {
    auto view = sorted_view(v);
    for (std::size_t i = 1; i < view.size(); ++i)
      if (key_equal(*view[i - 1], *view[i])) fail(path, std::string("duplicate ") + what + " key");
  }

  void check_set_keys() {
    check_unique(class_.interfaces, "interfaces", "interface");
    check_unique(class_.fields, "fields", "field");
    check_unique(class_.methods, "methods", "method");
    check_unique(class_.constants, "constants", "constant");
    check_unique(class_.attributes, "attributes", "attribute");
  }

  void check_field(const FieldAst& f) {
    std::string path = "fields[" + f.name + "]";
    if (f.name.empty()) fail(path, "empty field name");
    if (f.type.base == BaseType::Void) fail(path, "field of type void");
    check_unique(f.attributes, path.c_str(), "attribute");
    for (const auto& a : f.attributes) check_attribute(a, AttrContext::Field, path + ".attributes");
  }

  void check_method(const MethodAst& m) {
    std::string path = "methods[" + m.signature.pretty() + "]";
    if (m.signature.name.empty()) fail(path, "empty method name");
    check_unique(m.attributes, path.c_str(), "attribute");
    bool has_code = m.code() != nullptr;
    if ((m.flags & (kAccAbstract | kAccNative)) && has_code)
      fail(path, "abstract/native method carries a Code attribute");
    for (const auto& a : m.attributes) check_attribute(a, AttrContext::Method, path + ".attributes");
  }

  void check_attribute(const AttributeAst& a, AttrContext ctx, const std::string& parent) {
    std::string path = parent + "[" + a.name + "]";
    AttrKind expected = attribute_kind(a.name, ctx);
    AttrKind actual = content_kind(a.content);
    if (actual != expected && !(expected == AttrKind::Opaque && actual == AttrKind::Opaque))
      fail(path, "content does not match the structured form implied by the attribute name");
    if (const auto* code = std::get_if<CodeAst>(&a.content)) check_code(*code, path);
  }

  void check_code(const CodeAst& code, const std::string& path) {
    const std::size_t n = code.instructions.size();
    if (n == 0) fail(path, "empty instruction sequence");
    for (std::size_t i = 0; i < n; ++i) check_instruction(code.instructions[i], path, i, n);
    for (const auto& h : code.handlers) {
      if (h.start >= h.end || h.end > n)
        fail(path + ".handlers", "handler range [" + std::to_string(h.start) + ", " +
                                     std::to_string(h.end) + ") out of bounds");
      if (h.handler >= n) fail(path + ".handlers", "dangling handler target " + std::to_string(h.handler));
      if (h.catch_type && !valid_binary_class_name(*h.catch_type))
        fail(path + ".handlers", "invalid catch type name");
    }
    check_unique(code.attributes, path.c_str(), "attribute");
    for (const auto& a : code.attributes) {
      check_attribute(a, AttrContext::Code, path + ".attributes");
      if (const auto* lnt = std::get_if<LineNumberTableAttr>(&a.content)) {
        for (const auto& e : lnt->lines)
          if (e.instruction >= n) fail(path + ".LineNumberTable", "dangling instruction index");
      } else if (const auto* smt = std::get_if<StackMapTableAttr>(&a.content)) {
        std::uint32_t prev = 0;
        bool first = true;
        for (const auto& fr : smt->frames) {
          if (fr.at_instruction >= n) fail(path + ".StackMapTable", "dangling frame target");
          if (!first && fr.at_instruction <= prev)
            fail(path + ".StackMapTable", "frame targets not strictly increasing");
          prev = fr.at_instruction;
          first = false;
          if (fr.kind == StackMapFrame::Kind::Chop && (fr.chop_count < 1 || fr.chop_count > 3))
            fail(path + ".StackMapTable", "chop count out of range");
          if (fr.kind == StackMapFrame::Kind::Append &&
              (fr.locals.empty() || fr.locals.size() > 3))
            fail(path + ".StackMapTable", "append frame must add 1..3 locals");
          if (fr.kind == StackMapFrame::Kind::SameLocals1 && fr.stack.size() != 1)
            fail(path + ".StackMapTable", "same-locals-1 frame must carry exactly one stack item");
          for (const auto* types : {&fr.locals, &fr.stack})
            for (const auto& vt : *types)
              if (vt.kind == VerificationType::Kind::Uninitialized && vt.new_instruction >= n)
                fail(path + ".StackMapTable", "dangling uninitialized-type target");
        }
      }
    }
  }

  void check_instruction(const Instruction& in, const std::string& path, std::size_t i, std::size_t n) {
    std::string where = path + ".instructions[" + std::to_string(i) + "]";
    const OpcodeInfo* info = opcode_info(static_cast<std::uint8_t>(in.op));
    if (info == nullptr || info->operand == OperandKind::Internal) {
      fail(where, "opcode not valid in decoded form");
      return;
    }
    auto expect = [&](bool ok, const char* msg) {
      if (!ok) fail(where, std::string(mnemonic(in.op)) + ": " + msg);
    };
    switch (info->operand) {
      case OperandKind::None:
        expect(std::holds_alternative<std::monostate>(in.operand), "unexpected operand");
        break;
      case OperandKind::Imm8: {
        const auto* imm = std::get_if<Imm>(&in.operand);
        expect(imm != nullptr, "expected immediate operand");
        if (imm) expect(imm->value >= -128 && imm->value <= 127, "immediate out of s1 range");
        break;
      }
      case OperandKind::Imm16: {
        const auto* imm = std::get_if<Imm>(&in.operand);
        expect(imm != nullptr, "expected immediate operand");
        if (imm) expect(imm->value >= -32768 && imm->value <= 32767, "immediate out of s2 range");
        break;
      }
      case OperandKind::Local:
        expect(std::holds_alternative<LocalVar>(in.operand), "expected local-variable operand");
        break;
      case OperandKind::LocalInc: {
        const auto* inc = std::get_if<IincArgs>(&in.operand);
        expect(inc != nullptr, "expected iinc operand");
        if (inc) expect(inc->delta >= -32768 && inc->delta <= 32767, "delta out of s2 range");
        break;
      }
      case OperandKind::Const: {
        const auto* c = std::get_if<ConstantValue>(&in.operand);
        expect(c != nullptr, "expected constant operand");
        if (c) {
          if (in.op == Opcode::ldc2_w)
            expect(c->is_wide(), "ldc2_w requires a long or double constant");
          else
            expect(!c->is_wide(), "ldc cannot load a long or double constant");
        }
        break;
      }
      case OperandKind::FieldRef:
      case OperandKind::MethodRef:
      case OperandKind::InterfaceRef:
        expect(std::holds_alternative<MemberRef>(in.operand), "expected member-reference operand");
        break;
      case OperandKind::DynamicRef: {
        const auto* c = std::get_if<ConstantValue>(&in.operand);
        expect(c != nullptr && c->tag == ConstantValue::Tag::InvokeDynamic,
               "expected invoke-dynamic constant operand");
        break;
      }
      case OperandKind::Type:
        expect(std::holds_alternative<TypeRef>(in.operand), "expected type operand");
        break;
      case OperandKind::NewArrayType: {
        const auto* at = std::get_if<NewArrayType>(&in.operand);
        expect(at != nullptr, "expected primitive array-type operand");
        if (at) expect(at->atype >= 4 && at->atype <= 11, "atype out of range");
        break;
      }
      case OperandKind::MultiArray: {
        const auto* ma = std::get_if<MultiArrayArgs>(&in.operand);
        expect(ma != nullptr, "expected multianewarray operand");
        if (ma) expect(ma->dims >= 1, "dimension count must be at least 1");
        break;
      }
      case OperandKind::Branch: {
        const auto* b = std::get_if<BranchTarget>(&in.operand);
        expect(b != nullptr, "expected branch target");
        if (b) expect(b->index < n, "dangling branch target");
        break;
      }
      case OperandKind::Switch: {
        const auto* sw = std::get_if<SwitchTable>(&in.operand);
        expect(sw != nullptr, "expected switch table");
        if (sw) {
          expect(sw->default_target < n, "dangling default target");
          for (const auto& [key, target] : sw->cases) expect(target < n, "dangling case target");
          if (in.op == Opcode::tableswitch)
            expect(!sw->cases.empty(), "tableswitch needs at least one case");
          for (std::size_t j = 1; j < sw->cases.size(); ++j) {
            expect(sw->cases[j - 1].first < sw->cases[j].first, "switch keys not strictly ascending");
            if (in.op == Opcode::tableswitch)
              expect(sw->cases[j].first == sw->cases[j - 1].first + 1, "tableswitch keys not consecutive");
          }
        }
        break;
      }
      case OperandKind::Internal:
        break;
    }
  }

  void check_closure() {
    std::set<ConstantValue> declared(class_.constants.begin(), class_.constants.end());
    for (const auto& needed : pool_closure(class_)) {
      if (!declared.count(needed))
        fail("constants", "missing constant required by the class body: " + needed.pretty());
    }
  }

  const ClassAst& class_;
  std::vector<Violation> out_;
};

}  // namespace detail

/// Checks every structural invariant; returns one entry per violation (empty
/// means the AST is well-formed). Never throws.
inline std::vector<Violation> validate(const ClassAst& c) { return detail::Validator(c).run(); }

inline std::string class_simple_name(std::string_view binary_name) {
  auto slash = binary_name.rfind('/');
  return std::string(slash == std::string_view::npos ? binary_name : binary_name.substr(slash + 1));
}

}  // namespace aspa

#endif  // ASPA_AST_HPP
