#ifndef ASPA_CONSTANT_HPP
#define ASPA_CONSTANT_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace aspa {

/// A fully resolved constant-pool value. Nested references (class names,
/// name-and-type pairs, member targets) are stored by value so the constant
/// is self-contained; no pool indexes appear anywhere.
///
/// Numeric payloads are kept as raw bit patterns: two floats are the same
/// constant exactly when their bits agree, which keeps NaN payloads and
/// signed zeroes intact across round trips.
struct ConstantValue {
  enum class Tag : std::uint8_t {
    Utf8 = 1,
    Integer = 3,
    Float = 4,
    Long = 5,
    Double = 6,
    Class = 7,
    String = 8,
    FieldRef = 9,
    MethodRef = 10,
    InterfaceMethodRef = 11,
    NameAndType = 12,
    MethodHandle = 15,
    MethodType = 16,
    InvokeDynamic = 18,
  };

  Tag tag = Tag::Utf8;
  std::uint64_t bits = 0;           // Integer/Float (low 32) and Long/Double payloads
  std::uint8_t ref_kind = 0;        // MethodHandle reference kind
  std::uint8_t ref_tag = 0;         // MethodHandle referenced member tag (9/10/11)
  std::uint16_t bootstrap_index = 0;  // InvokeDynamic bootstrap-method attribute slot, carried verbatim
  std::string text;                 // Utf8 value / Class name / String value / MethodType descriptor
  std::string owner;                // member refs: owning class
  std::string member_name;          // member refs and NameAndType: name
  std::string descriptor;           // member refs and NameAndType: descriptor

  static ConstantValue utf8(std::string s) {
    ConstantValue c;
    c.tag = Tag::Utf8;
    c.text = std::move(s);
    return c;
  }
  static ConstantValue integer(std::int32_t v) {
    ConstantValue c;
    c.tag = Tag::Integer;
    c.bits = static_cast<std::uint32_t>(v);
    return c;
  }
  static ConstantValue float_bits(std::uint32_t raw) {
    ConstantValue c;
    c.tag = Tag::Float;
    c.bits = raw;
    return c;
  }
  static ConstantValue long_value(std::int64_t v) {
    ConstantValue c;
    c.tag = Tag::Long;
    c.bits = static_cast<std::uint64_t>(v);
    return c;
  }
  static ConstantValue double_bits(std::uint64_t raw) {
    ConstantValue c;
    c.tag = Tag::Double;
    c.bits = raw;
    return c;
  }
  static ConstantValue class_ref(std::string name) {
    ConstantValue c;
    c.tag = Tag::Class;
    c.text = std::move(name);
    return c;
  }
  static ConstantValue string_ref(std::string value) {
    ConstantValue c;
    c.tag = Tag::String;
    c.text = std::move(value);
    return c;
  }
  static ConstantValue member_ref(Tag kind, std::string owner, std::string name, std::string desc) {
    ConstantValue c;
    c.tag = kind;
    c.owner = std::move(owner);
    c.member_name = std::move(name);
    c.descriptor = std::move(desc);
    return c;
  }
  static ConstantValue name_and_type(std::string name, std::string desc) {
    ConstantValue c;
    c.tag = Tag::NameAndType;
    c.member_name = std::move(name);
    c.descriptor = std::move(desc);
    return c;
  }
  static ConstantValue method_type(std::string desc) {
    ConstantValue c;
    c.tag = Tag::MethodType;
    c.text = std::move(desc);
    return c;
  }
  static ConstantValue method_handle(std::uint8_t kind, Tag member_tag, std::string owner,
                                     std::string name, std::string desc) {
    ConstantValue c;
    c.tag = Tag::MethodHandle;
    c.ref_kind = kind;
    c.ref_tag = static_cast<std::uint8_t>(member_tag);
    c.owner = std::move(owner);
    c.member_name = std::move(name);
    c.descriptor = std::move(desc);
    return c;
  }
  static ConstantValue invoke_dynamic(std::uint16_t bootstrap, std::string name, std::string desc) {
    ConstantValue c;
    c.tag = Tag::InvokeDynamic;
    c.bootstrap_index = bootstrap;
    c.member_name = std::move(name);
    c.descriptor = std::move(desc);
    return c;
  }

  /// Unambiguous payload encoding; (tag, key_bytes) identifies a constant and
  /// doubles as the deterministic ordering key.
  std::string key_bytes() const {
    std::string k;
    auto put_str = [&k](const std::string& s) {
      std::uint32_t n = static_cast<std::uint32_t>(s.size());
      k.push_back(static_cast<char>(n >> 24));
      k.push_back(static_cast<char>(n >> 16));
      k.push_back(static_cast<char>(n >> 8));
      k.push_back(static_cast<char>(n));
      k += s;
    };
    auto put_u64 = [&k](std::uint64_t v) {
      for (int shift = 56; shift >= 0; shift -= 8) k.push_back(static_cast<char>(v >> shift));
    };
    switch (tag) {
      case Tag::Utf8:
      case Tag::Class:
      case Tag::String:
      case Tag::MethodType:
        k += text;
        break;
      case Tag::Integer:
      case Tag::Float:
        for (int shift = 24; shift >= 0; shift -= 8) k.push_back(static_cast<char>(bits >> shift));
        break;
      case Tag::Long:
      case Tag::Double:
        put_u64(bits);
        break;
      case Tag::NameAndType:
        put_str(member_name);
        put_str(descriptor);
        break;
      case Tag::FieldRef:
      case Tag::MethodRef:
      case Tag::InterfaceMethodRef:
        put_str(owner);
        put_str(member_name);
        put_str(descriptor);
        break;
      case Tag::MethodHandle:
        k.push_back(static_cast<char>(ref_kind));
        k.push_back(static_cast<char>(ref_tag));
        put_str(owner);
        put_str(member_name);
        put_str(descriptor);
        break;
      case Tag::InvokeDynamic:
        k.push_back(static_cast<char>(bootstrap_index >> 8));
        k.push_back(static_cast<char>(bootstrap_index));
        put_str(member_name);
        put_str(descriptor);
        break;
    }
    return k;
  }

  bool is_wide() const noexcept { return tag == Tag::Long || tag == Tag::Double; }

  friend bool operator==(const ConstantValue& a, const ConstantValue& b) {
    return a.tag == b.tag && a.key_bytes() == b.key_bytes();
  }

  friend bool operator<(const ConstantValue& a, const ConstantValue& b) {
    if (a.tag != b.tag) return static_cast<std::uint8_t>(a.tag) < static_cast<std::uint8_t>(b.tag);
    return a.key_bytes() < b.key_bytes();
  }

  /// Constants this one's pool encoding refers to (one level deep).
  std::vector<ConstantValue> components() const {
    switch (tag) {
      case Tag::Class:
      case Tag::String:
        return {utf8(text)};
      case Tag::MethodType:
        return {utf8(text)};
      case Tag::NameAndType:
        return {utf8(member_name), utf8(descriptor)};
      case Tag::FieldRef:
      case Tag::MethodRef:
      case Tag::InterfaceMethodRef:
        return {class_ref(owner), name_and_type(member_name, descriptor)};
      case Tag::MethodHandle:
        return {member_ref(static_cast<Tag>(ref_tag), owner, member_name, descriptor)};
      case Tag::InvokeDynamic:
        return {name_and_type(member_name, descriptor)};
      default:
        return {};
    }
  }

  /// Human form used in patch dumps: `utf8 "y"`, `class java/lang/Object`, ...
  std::string pretty() const;
};

namespace detail {

inline std::string quote_utf8(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string ConstantValue::pretty() const {
  switch (tag) {
    case Tag::Utf8: return "utf8 " + detail::quote_utf8(text);
    case Tag::Integer: return "i4 " + std::to_string(static_cast<std::int32_t>(bits));
    case Tag::Float: return "f4 bits=0x" + [this] {
      char buf[9];
      std::snprintf(buf, sizeof buf, "%08x", static_cast<std::uint32_t>(bits));
      return std::string(buf);
    }();
    case Tag::Long: return "i8 " + std::to_string(static_cast<std::int64_t>(bits));
    case Tag::Double: return "f8 bits=0x" + [this] {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
      return std::string(buf);
    }();
    case Tag::Class: return "class " + text;
    case Tag::String: return "string " + detail::quote_utf8(text);
    case Tag::FieldRef: return "fieldref " + owner + "." + member_name + ":" + descriptor;
    case Tag::MethodRef: return "methodref " + owner + "." + member_name + descriptor;
    case Tag::InterfaceMethodRef: return "interfacemethodref " + owner + "." + member_name + descriptor;
    case Tag::NameAndType: return "nameandtype " + member_name + ":" + descriptor;
    case Tag::MethodHandle:
      return "methodhandle kind=" + std::to_string(ref_kind) + " " + owner + "." + member_name + descriptor;
    case Tag::MethodType: return "methodtype " + text;
    case Tag::InvokeDynamic:
      return "invokedynamic bsm=" + std::to_string(bootstrap_index) + " " + member_name + descriptor;
  }
  return "?";
}

}  // namespace aspa

#endif  // ASPA_CONSTANT_HPP
