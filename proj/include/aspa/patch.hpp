#ifndef ASPA_PATCH_HPP
#define ASPA_PATCH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/bytes.hpp"

namespace aspa {

/// Terminal patch: engaged means "replace with this value", disengaged means
/// unchanged. Patches never carry a replacement equal to the old value.
template <typename T>
using ScalarPatch = std::optional<T>;

enum class SeqOpKind : std::uint8_t { Copy, Delete, Insert, PatchItem };

/// Edit script over a sequence attribute. Applying the ops left to right
/// against the old sequence reconstructs the new one exactly.
template <typename T, typename ItemPatch = std::monostate>
struct SeqPatch {
  struct Op {
    SeqOpKind kind = SeqOpKind::Copy;
    std::uint32_t count = 0;    // Copy / Delete
    std::vector<T> items;       // Insert
    ItemPatch item_patch{};     // PatchItem (consumes one old element)
  };

  std::vector<Op> ops;

  bool unchanged() const {
    return ops.empty() || (ops.size() == 1 && ops.front().kind == SeqOpKind::Copy);
  }

  std::size_t edit_count() const {
    std::size_t n = 0;
    for (const auto& op : ops) {
      if (op.kind == SeqOpKind::Delete) n += op.count;
      else if (op.kind == SeqOpKind::Insert) n += op.items.size();
    }
    return n;
  }
};

/// Keyed-set patch: removals by key, additions as complete members, and
/// members patched in place under an unchanged key. All three lists are in
/// sorted key order and have pairwise disjoint key sets.
template <typename Member, typename Key, typename ChildPatch>
struct SetPatch {
  std::vector<Key> removed;
  std::vector<Member> added;
  std::vector<std::pair<Key, ChildPatch>> patched;

  bool unchanged() const { return removed.empty() && added.empty() && patched.empty(); }
};

/// Placeholder child for sets whose members are atomic (constants,
/// interface names): equal keys imply equal members, so nothing patches.
struct NoChild {
  bool unchanged() const { return true; }
};

struct AttributePatch;

using AttrSetPatch = SetPatch<AttributeAst, std::string, AttributePatch>;

struct HandlerPatch {
  ScalarPatch<std::uint32_t> start;
  ScalarPatch<std::uint32_t> end;
  ScalarPatch<std::uint32_t> handler;
  ScalarPatch<std::optional<std::string>> catch_type;

  bool unchanged() const { return !start && !end && !handler && !catch_type; }
};

using InstrSeqPatch = SeqPatch<Instruction>;
using HandlerSeqPatch = SeqPatch<ExceptionHandler, HandlerPatch>;
using StringSeqPatch = SeqPatch<std::string>;
using LineSeqPatch = SeqPatch<LineEntry>;
using InnerClassSeqPatch = SeqPatch<InnerClassRow>;
using FrameSeqPatch = SeqPatch<StackMapFrame>;

struct CodePatch {
  InstrSeqPatch instructions;
  ScalarPatch<std::uint16_t> max_stack;
  ScalarPatch<std::uint16_t> max_locals;
  HandlerSeqPatch handlers;
  AttrSetPatch attributes;

  bool unchanged() const {
    return instructions.unchanged() && !max_stack && !max_locals && handlers.unchanged() &&
           attributes.unchanged();
  }
};

/// Patch of one attribute's content; the variant alternative mirrors the
/// attribute's structured kind (the attribute name, which is the set key,
/// pins that kind).
struct AttributePatch {
  std::variant<CodePatch,                    // Code
               StringSeqPatch,               // Exceptions
               ScalarPatch<ConstantValue>,   // ConstantValue
               ScalarPatch<std::string>,     // SourceFile / Signature
               InnerClassSeqPatch,           // InnerClasses
               LineSeqPatch,                 // LineNumberTable
               FrameSeqPatch,                // StackMapTable
               ScalarPatch<Bytes>>           // opaque payload replacement
      content;

  bool unchanged() const {
    return std::visit(
        [](const auto& v) -> bool {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, CodePatch>) return v.unchanged();
          else if constexpr (std::is_same_v<T, StringSeqPatch> ||
                             std::is_same_v<T, InnerClassSeqPatch> ||
                             std::is_same_v<T, LineSeqPatch> || std::is_same_v<T, FrameSeqPatch>)
            return v.unchanged();
          else
            return !v.has_value();
        },
        content);
  }
};

struct FieldPatch {
  ScalarPatch<JavaType> type;
  ScalarPatch<std::uint16_t> flags;
  AttrSetPatch attributes;

  bool unchanged() const { return !type && !flags && attributes.unchanged(); }
};

struct MethodPatch {
  ScalarPatch<std::uint16_t> flags;
  AttrSetPatch attributes;

  bool unchanged() const { return !flags && attributes.unchanged(); }
};

using FieldSetPatch = SetPatch<FieldAst, std::string, FieldPatch>;
using MethodSetPatch = SetPatch<MethodAst, Signature, MethodPatch>;
using ConstSetPatch = SetPatch<ConstantValue, ConstantValue, NoChild>;
using InterfaceSetPatch = SetPatch<std::string, std::string, NoChild>;

/// Tree-edit script over a whole class: one child per Class attribute, in
/// grammar order. All children unchanged collapses to "unchanged".
struct ClassPatch {
  ScalarPatch<std::string> class_type;
  ScalarPatch<std::optional<std::string>> superclass;
  InterfaceSetPatch interfaces;
  FieldSetPatch fields;
  MethodSetPatch methods;
  ConstSetPatch constants;
  AttrSetPatch attributes;
  ScalarPatch<std::uint32_t> version;
  ScalarPatch<std::uint16_t> flags;

  bool unchanged() const {
    return !class_type && !superclass && interfaces.unchanged() && fields.unchanged() &&
           methods.unchanged() && constants.unchanged() && attributes.unchanged() && !version &&
           !flags;
  }
};

/// Single patch covering every entry of an archive.
struct ArchivePatch {
  struct ResourceDelta {
    enum class Kind : std::uint8_t { Added, Removed, Replaced };
    Kind kind = Kind::Added;
    Bytes bytes;  // Added / Replaced payload
  };

  std::map<std::string, ClassPatch> patched;   // class name -> in-place patch
  std::map<std::string, ClassAst> added;       // class name -> complete class
  std::set<std::string> removed;               // class names
  std::map<std::string, ResourceDelta> other_entries;  // non-class entries, whole-file deltas

  bool unchanged() const {
    return patched.empty() && added.empty() && removed.empty() && other_entries.empty();
  }
};

/// Table 1-style counters for an archive patch.
struct ArchiveStats {
  std::size_t patched = 0;
  std::size_t added = 0;
  std::size_t removed = 0;
  std::size_t total = 0;

  bool operator==(const ArchiveStats&) const = default;
};

inline ArchiveStats archive_stats(const ArchivePatch& p) {
  ArchiveStats s;
  s.patched = p.patched.size();
  s.added = p.added.size();
  s.removed = p.removed.size();
  s.total = s.patched + s.added + s.removed;
  return s;
}

}  // namespace aspa

#endif  // ASPA_PATCH_HPP
