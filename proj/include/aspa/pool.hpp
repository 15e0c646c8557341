#ifndef ASPA_POOL_HPP
#define ASPA_POOL_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/bytes.hpp"
#include "aspa/constant.hpp"
#include "aspa/error.hpp"

namespace aspa {

/// Deterministic constant-to-index assignment used only at emit time.
/// Entries are ordered by (tag, canonical payload bytes); long/double
/// entries consume two slots, as the JVM pool format demands. An AST never
/// sees these indexes.
class PoolLayout {
 public:
  /// Lays out exactly the given constants (deduplicated, closed over
  /// components by the caller).
  static PoolLayout from_constants(const std::set<ConstantValue>& constants) {
    PoolLayout layout;
    std::uint32_t next = 1;
    for (const auto& c : constants) {  // std::set iterates in (tag, payload) order
      layout.index_.emplace(c, static_cast<std::uint16_t>(next));
      layout.entries_.emplace_back(c, static_cast<std::uint16_t>(next));
      next += c.is_wide() ? 2 : 1;
      if (next > 65535)
        throw emit_error(errc::capacity_overflow,
                         "constant pool needs more than 65534 slots");
    }
    layout.slot_count_ = static_cast<std::uint16_t>(next);
    return layout;
  }

  /// Index of `c`; the constant must be covered by the layout.
  std::uint16_t index_of(const ConstantValue& c) const {
    auto it = index_.find(c);
    if (it == index_.end())
      throw emit_error(errc::unresolved_constant, "constant not in pool: " + c.pretty());
    return it->second;
  }

  std::uint16_t index_of_utf8(const std::string& s) const { return index_of(ConstantValue::utf8(s)); }
  std::uint16_t index_of_class(const std::string& name) const {
    return index_of(ConstantValue::class_ref(name));
  }

  bool contains(const ConstantValue& c) const { return index_.find(c) != index_.end(); }

  /// Entries in index order, paired with their assigned index.
  const std::vector<std::pair<ConstantValue, std::uint16_t>>& entries() const { return entries_; }

  /// The value of the class-file constant_pool_count field (slots + 1).
  std::uint16_t slot_count() const { return slot_count_; }

  /// Writes count followed by all entries in JVM pool-entry format.
  void write(ByteWriter& w) const {
    w.u2(slot_count_);
    for (const auto& [c, idx] : entries_) write_entry(w, c);
  }

  void write_entry(ByteWriter& w, const ConstantValue& c) const {
    using Tag = ConstantValue::Tag;
    w.u1(static_cast<std::uint8_t>(c.tag));
    switch (c.tag) {
      case Tag::Utf8: {
        if (c.text.size() > 65535)
          throw emit_error(errc::capacity_overflow, "utf8 constant longer than 65535 bytes");
        w.u2(static_cast<std::uint16_t>(c.text.size()));
        w.str(c.text);
        break;
      }
      case Tag::Integer:
      case Tag::Float:
        w.u4(static_cast<std::uint32_t>(c.bits));
        break;
      case Tag::Long:
      case Tag::Double:
        w.u8(c.bits);
        break;
      case Tag::Class:
      case Tag::String:
      case Tag::MethodType:
        w.u2(index_of(ConstantValue::utf8(c.text)));
        break;
      case Tag::NameAndType:
        w.u2(index_of(ConstantValue::utf8(c.member_name)));
        w.u2(index_of(ConstantValue::utf8(c.descriptor)));
        break;
      case Tag::FieldRef:
      case Tag::MethodRef:
      case Tag::InterfaceMethodRef:
        w.u2(index_of(ConstantValue::class_ref(c.owner)));
        w.u2(index_of(ConstantValue::name_and_type(c.member_name, c.descriptor)));
        break;
      case Tag::MethodHandle:
        w.u1(c.ref_kind);
        w.u2(index_of(ConstantValue::member_ref(static_cast<Tag>(c.ref_tag), c.owner,
                                                c.member_name, c.descriptor)));
        break;
      case Tag::InvokeDynamic:
        w.u2(c.bootstrap_index);
        w.u2(index_of(ConstantValue::name_and_type(c.member_name, c.descriptor)));
        break;
    }
  }

 private:
  std::vector<std::pair<ConstantValue, std::uint16_t>> entries_;
  std::map<ConstantValue, std::uint16_t> index_;
  std::uint16_t slot_count_ = 1;
};

/// Pool layout for a whole class: the declared constant set plus everything
/// the class body structurally requires.
inline PoolLayout build_pool(const ClassAst& a) {
  return PoolLayout::from_constants(pool_closure(a));
}

}  // namespace aspa

#endif  // ASPA_POOL_HPP
