#ifndef ASPA_JAVA_TYPE_HPP
#define ASPA_JAVA_TYPE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aspa/error.hpp"

namespace aspa {

enum class BaseType : std::uint8_t {
  Void,
  Boolean,
  Byte,
  Char,
  Short,
  Int,
  Long,
  Float,
  Double,
  Object,
};

/// A Java type as it appears in descriptors: a base type (possibly a class or
/// interface reference) under zero or more array dimensions.
struct JavaType {
  BaseType base = BaseType::Void;
  std::uint8_t dims = 0;
  std::string class_name;  // set iff base == Object; JVM binary form, e.g. "java/lang/String"

  bool operator==(const JavaType&) const = default;

  static JavaType primitive(BaseType b) { return JavaType{b, 0, {}}; }
  static JavaType object(std::string name) { return JavaType{BaseType::Object, 0, std::move(name)}; }

  JavaType array_of(std::uint8_t extra_dims = 1) const {
    JavaType t = *this;
    t.dims = static_cast<std::uint8_t>(t.dims + extra_dims);
    return t;
  }

  std::string descriptor() const {
    std::string d(dims, '[');
    switch (base) {
      case BaseType::Void: d += 'V'; break;
      case BaseType::Boolean: d += 'Z'; break;
      case BaseType::Byte: d += 'B'; break;
      case BaseType::Char: d += 'C'; break;
      case BaseType::Short: d += 'S'; break;
      case BaseType::Int: d += 'I'; break;
      case BaseType::Long: d += 'J'; break;
      case BaseType::Float: d += 'F'; break;
      case BaseType::Double: d += 'D'; break;
      case BaseType::Object:
        d += 'L';
        d += class_name;
        d += ';';
        break;
    }
    return d;
  }

  /// Human form: "int", "java/lang/Object", "int[]".
  std::string pretty() const {
    std::string s;
    switch (base) {
      case BaseType::Void: s = "void"; break;
      case BaseType::Boolean: s = "boolean"; break;
      case BaseType::Byte: s = "byte"; break;
      case BaseType::Char: s = "char"; break;
      case BaseType::Short: s = "short"; break;
      case BaseType::Int: s = "int"; break;
      case BaseType::Long: s = "long"; break;
      case BaseType::Float: s = "float"; break;
      case BaseType::Double: s = "double"; break;
      case BaseType::Object: s = class_name; break;
    }
    for (int i = 0; i < dims; ++i) s += "[]";
    return s;
  }
};

namespace detail {

inline JavaType parse_type_at(std::string_view desc, std::size_t& pos, std::size_t err_offset) {
  JavaType t;
  while (pos < desc.size() && desc[pos] == '[') {
    if (t.dims == 255)
      throw parse_error(errc::malformed_descriptor, err_offset, "more than 255 array dimensions");
    ++t.dims;
    ++pos;
  }
  if (pos >= desc.size())
    throw parse_error(errc::malformed_descriptor, err_offset, "descriptor ends inside array type");
  char c = desc[pos++];
  switch (c) {
    case 'V': t.base = BaseType::Void; break;
    case 'Z': t.base = BaseType::Boolean; break;
    case 'B': t.base = BaseType::Byte; break;
    case 'C': t.base = BaseType::Char; break;
    case 'S': t.base = BaseType::Short; break;
    case 'I': t.base = BaseType::Int; break;
    case 'J': t.base = BaseType::Long; break;
    case 'F': t.base = BaseType::Float; break;
    case 'D': t.base = BaseType::Double; break;
    case 'L': {
      t.base = BaseType::Object;
      std::size_t end = desc.find(';', pos);
      if (end == std::string_view::npos)
        throw parse_error(errc::malformed_descriptor, err_offset, "unterminated class type");
      if (end == pos)
        throw parse_error(errc::malformed_descriptor, err_offset, "empty class name in descriptor");
      t.class_name.assign(desc.substr(pos, end - pos));
      pos = end + 1;
      break;
    }
    default:
      throw parse_error(errc::malformed_descriptor, err_offset,
                        std::string("unexpected descriptor character '") + c + "'");
  }
  if (t.base == BaseType::Void && t.dims != 0)
    throw parse_error(errc::malformed_descriptor, err_offset, "array of void");
  return t;
}

}  // namespace detail

inline JavaType parse_field_descriptor(std::string_view desc, std::size_t err_offset = 0) {
  std::size_t pos = 0;
  JavaType t = detail::parse_type_at(desc, pos, err_offset);
  if (pos != desc.size())
    throw parse_error(errc::malformed_descriptor, err_offset, "trailing bytes in field descriptor");
  if (t.base == BaseType::Void)
    throw parse_error(errc::malformed_descriptor, err_offset, "void field descriptor");
  return t;
}

inline std::pair<std::vector<JavaType>, JavaType> parse_method_descriptor(std::string_view desc,
                                                                          std::size_t err_offset = 0) {
  if (desc.empty() || desc.front() != '(')
    throw parse_error(errc::malformed_descriptor, err_offset, "method descriptor must start with '('");
  std::size_t pos = 1;
  std::vector<JavaType> args;
  while (pos < desc.size() && desc[pos] != ')') {
    args.push_back(detail::parse_type_at(desc, pos, err_offset));
    if (args.back().base == BaseType::Void)
      throw parse_error(errc::malformed_descriptor, err_offset, "void argument type");
  }
  if (pos >= desc.size())
    throw parse_error(errc::malformed_descriptor, err_offset, "method descriptor missing ')'");
  ++pos;  // ')'
  JavaType ret = detail::parse_type_at(desc, pos, err_offset);
  if (pos != desc.size())
    throw parse_error(errc::malformed_descriptor, err_offset, "trailing bytes in method descriptor");
  return {std::move(args), ret};
}

/// Method identity: name plus argument and return types. Two methods are the
/// same set member exactly when their signatures are equal.
struct Signature {
  std::string name;
  JavaType return_type;
  std::vector<JavaType> args;

  bool operator==(const Signature&) const = default;

  std::string method_descriptor() const {
    std::string d = "(";
    for (const auto& a : args) d += a.descriptor();
    d += ')';
    d += return_type.descriptor();
    return d;
  }

  static Signature from_descriptor(std::string name, std::string_view desc, std::size_t err_offset = 0) {
    auto [args, ret] = parse_method_descriptor(desc, err_offset);
    return Signature{std::move(name), ret, std::move(args)};
  }

  /// "int getX()" / "void setX(int)"; constructors keep their "<init>" name
  /// here, renderers may substitute the class name.
  std::string pretty() const {
    std::string s = return_type.pretty();
    s += ' ';
    s += name;
    s += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ", ";
      s += args[i].pretty();
    }
    s += ')';
    return s;
  }
};

inline bool signature_less(const Signature& a, const Signature& b) {
  if (a.name != b.name) return a.name < b.name;
  return a.method_descriptor() < b.method_descriptor();
}

}  // namespace aspa

#endif  // ASPA_JAVA_TYPE_HPP
