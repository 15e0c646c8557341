#ifndef ASPA_PATCH_IO_HPP
#define ASPA_PATCH_IO_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/bytes.hpp"
#include "aspa/classfile_read.hpp"
#include "aspa/classfile_write.hpp"
#include "aspa/error.hpp"
#include "aspa/patch.hpp"
#include "aspa/pool.hpp"
#include "aspa/zlib_util.hpp"

namespace aspa {

// Patch file framing. Header: magic, format version (u2), compression byte.
// The body starts with a kind byte; a class body carries the class name and
// one mini constant pool (JVM pool format), then the patch tree. Node tags
// spell out the change marks: '=' unchanged, 'R' replace, 'T' tuple, 'S' set,
// 'Q' sequence.
inline constexpr char kPatchMagic[4] = {'A', 'S', 'P', 'A'};
inline constexpr std::uint16_t kPatchFormatVersion = 1;

inline constexpr std::uint8_t kNodeUnchanged = 0x3D;
inline constexpr std::uint8_t kNodeReplace = 0x52;
inline constexpr std::uint8_t kNodeTuple = 0x54;
inline constexpr std::uint8_t kNodeSet = 0x53;
inline constexpr std::uint8_t kNodeSeq = 0x51;

inline constexpr std::uint8_t kBodyClass = 0x01;
inline constexpr std::uint8_t kBodyArchive = 0x02;

inline constexpr std::uint8_t kOpCopy = 0x43;
inline constexpr std::uint8_t kOpDelete = 0x44;
inline constexpr std::uint8_t kOpInsert = 0x49;
inline constexpr std::uint8_t kOpPatchItem = 0x50;

namespace detail {

// ----- mini-pool gathering --------------------------------------------------

inline void gather_attr_patch(const AttributePatch& p, ConstantCollector& col);

inline void gather_attr_set(const AttrSetPatch& p, ConstantCollector& col) {
  for (const auto& k : p.removed) col.add_utf8(k);
  for (const auto& a : p.added) col.add_attribute(a);
  for (const auto& [k, child] : p.patched) {
    col.add_utf8(k);
    gather_attr_patch(child, col);
  }
}

inline void gather_attr_patch(const AttributePatch& p, ConstantCollector& col) {
  std::visit(
      [&col](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CodePatch>) {
          for (const auto& op : v.instructions.ops)
            for (const auto& in : op.items) col.add_instruction(in);
          for (const auto& op : v.handlers.ops) {
            for (const auto& h : op.items)
              if (h.catch_type) col.add_utf8(*h.catch_type);
            if (op.kind == SeqOpKind::PatchItem && op.item_patch.catch_type &&
                op.item_patch.catch_type->has_value())
              col.add_utf8(**op.item_patch.catch_type);
          }
          gather_attr_set(v.attributes, col);
        } else if constexpr (std::is_same_v<T, StringSeqPatch>) {
          for (const auto& op : v.ops)
            for (const auto& s : op.items) col.add_utf8(s);
        } else if constexpr (std::is_same_v<T, ScalarPatch<ConstantValue>>) {
          if (v) col.add(*v);
        } else if constexpr (std::is_same_v<T, ScalarPatch<std::string>>) {
          if (v) col.add_utf8(*v);
        } else if constexpr (std::is_same_v<T, InnerClassSeqPatch>) {
          for (const auto& op : v.ops)
            for (const auto& row : op.items) {
              if (row.inner) col.add_utf8(*row.inner);
              if (row.outer) col.add_utf8(*row.outer);
              if (row.inner_name) col.add_utf8(*row.inner_name);
            }
        } else if constexpr (std::is_same_v<T, FrameSeqPatch>) {
          for (const auto& op : v.ops)
            for (const auto& frame : op.items) {
              for (const auto* types : {&frame.locals, &frame.stack})
                for (const auto& vt : *types)
                  if (vt.kind == VerificationType::Kind::Object) col.add_utf8(vt.class_name);
            }
        }
        // LineSeqPatch and ScalarPatch<Bytes> carry no constants.
      },
      p.content);
}

inline std::set<ConstantValue> gather_class_patch_constants(const ClassPatch& p) {
  ConstantCollector col;
  if (p.class_type) col.add_utf8(*p.class_type);
  if (p.superclass && p.superclass->has_value()) col.add_utf8(**p.superclass);
  for (const auto& k : p.interfaces.removed) col.add_utf8(k);
  for (const auto& a : p.interfaces.added) col.add_utf8(a);
  for (const auto& k : p.fields.removed) col.add_utf8(k);
  for (const auto& f : p.fields.added) col.add_field(f);
  for (const auto& [k, child] : p.fields.patched) {
    col.add_utf8(k);
    if (child.type) col.add_utf8(child.type->descriptor());
    gather_attr_set(child.attributes, col);
  }
  for (const auto& k : p.methods.removed) {
    col.add_utf8(k.name);
    col.add_utf8(k.method_descriptor());
  }
  for (const auto& m : p.methods.added) col.add_method(m);
  for (const auto& [k, child] : p.methods.patched) {
    col.add_utf8(k.name);
    col.add_utf8(k.method_descriptor());
    gather_attr_set(child.attributes, col);
  }
  for (const auto& c : p.constants.removed) col.add(c);
  for (const auto& c : p.constants.added) col.add(c);
  gather_attr_set(p.attributes, col);
  return col.take();
}

// ----- encoding -------------------------------------------------------------

class PatchEncoder {
 public:
  PatchEncoder(ByteWriter& w, const PoolLayout& pool) : w_(w), pool_(pool) {}

  void class_node(const ClassPatch& p) {
    if (p.unchanged()) {
      w_.u1(kNodeUnchanged);
      return;
    }
    w_.u1(kNodeTuple);
    std::uint64_t mask = 0;
    if (p.class_type) mask |= 1u << 0;
    if (p.superclass) mask |= 1u << 1;
    if (!p.interfaces.unchanged()) mask |= 1u << 2;
    if (!p.fields.unchanged()) mask |= 1u << 3;
    if (!p.methods.unchanged()) mask |= 1u << 4;
    if (!p.constants.unchanged()) mask |= 1u << 5;
    if (!p.attributes.unchanged()) mask |= 1u << 6;
    if (p.version) mask |= 1u << 7;
    if (p.flags) mask |= 1u << 8;
    w_.varint(mask);
    if (p.class_type) replace_string(*p.class_type);
    if (p.superclass) replace_opt_string(*p.superclass);
    if (!p.interfaces.unchanged()) interface_set(p.interfaces);
    if (!p.fields.unchanged()) field_set(p.fields);
    if (!p.methods.unchanged()) method_set(p.methods);
    if (!p.constants.unchanged()) const_set(p.constants);
    if (!p.attributes.unchanged()) attr_set(p.attributes);
    if (p.version) replace_varint(*p.version);
    if (p.flags) replace_varint(*p.flags);
  }

 private:
  void replace_varint(std::uint64_t v) {
    w_.u1(kNodeReplace);
    w_.varint(v);
  }

  void replace_string(const std::string& s) {
    w_.u1(kNodeReplace);
    w_.varint(pool_.index_of_utf8(s));
  }

  void replace_opt_string(const std::optional<std::string>& s) {
    w_.u1(kNodeReplace);
    w_.varint(s ? pool_.index_of_utf8(*s) : 0);
  }

  void str(const std::string& s) { w_.varint(pool_.index_of_utf8(s)); }
  void opt_str(const std::optional<std::string>& s) { w_.varint(s ? pool_.index_of_utf8(*s) : 0); }

  void interface_set(const InterfaceSetPatch& p) {
    w_.u1(kNodeSet);
    w_.varint(p.removed.size());
    for (const auto& k : p.removed) str(k);
    w_.varint(p.added.size());
    for (const auto& a : p.added) str(a);
    w_.varint(0);  // interface members never patch in place
  }

  void const_set(const ConstSetPatch& p) {
    w_.u1(kNodeSet);
    w_.varint(p.removed.size());
    for (const auto& c : p.removed) w_.varint(pool_.index_of(c));
    w_.varint(p.added.size());
    for (const auto& c : p.added) w_.varint(pool_.index_of(c));
    w_.varint(0);  // constants are atomic
  }

  void field_set(const FieldSetPatch& p) {
    w_.u1(kNodeSet);
    w_.varint(p.removed.size());
    for (const auto& k : p.removed) str(k);
    w_.varint(p.added.size());
    for (const auto& f : p.added) write_field(w_, f, pool_);
    w_.varint(p.patched.size());
    for (const auto& [k, child] : p.patched) {
      str(k);
      field_node(child);
    }
  }

  void method_set(const MethodSetPatch& p) {
    w_.u1(kNodeSet);
    w_.varint(p.removed.size());
    for (const auto& k : p.removed) {
      str(k.name);
      str(k.method_descriptor());
    }
    w_.varint(p.added.size());
    for (const auto& m : p.added) write_method(w_, m, pool_);
    w_.varint(p.patched.size());
    for (const auto& [k, child] : p.patched) {
      str(k.name);
      str(k.method_descriptor());
      method_node(child);
    }
  }

  void field_node(const FieldPatch& p) {
    w_.u1(kNodeTuple);
    std::uint64_t mask = 0;
    if (p.type) mask |= 1u << 0;
    if (p.flags) mask |= 1u << 1;
    if (!p.attributes.unchanged()) mask |= 1u << 2;
    w_.varint(mask);
    if (p.type) replace_string(p.type->descriptor());
    if (p.flags) replace_varint(*p.flags);
    if (!p.attributes.unchanged()) attr_set(p.attributes);
  }

  void method_node(const MethodPatch& p) {
    w_.u1(kNodeTuple);
    std::uint64_t mask = 0;
    if (p.flags) mask |= 1u << 0;
    if (!p.attributes.unchanged()) mask |= 1u << 1;
    w_.varint(mask);
    if (p.flags) replace_varint(*p.flags);
    if (!p.attributes.unchanged()) attr_set(p.attributes);
  }

  void attr_set(const AttrSetPatch& p) {
    w_.u1(kNodeSet);
    w_.varint(p.removed.size());
    for (const auto& k : p.removed) str(k);
    w_.varint(p.added.size());
    for (const auto& a : p.added) attr_value(a);
    w_.varint(p.patched.size());
    for (const auto& [k, child] : p.patched) {
      str(k);
      attr_node(child);
    }
  }

  void attr_node(const AttributePatch& p) {
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, CodePatch>) {
            code_node(v);
          } else if constexpr (std::is_same_v<T, StringSeqPatch>) {
            seq_node(v, [this](const std::string& s) { str(s); });
          } else if constexpr (std::is_same_v<T, ScalarPatch<ConstantValue>>) {
            w_.u1(kNodeReplace);
            w_.varint(pool_.index_of(*v));
          } else if constexpr (std::is_same_v<T, ScalarPatch<std::string>>) {
            replace_string(*v);
          } else if constexpr (std::is_same_v<T, InnerClassSeqPatch>) {
            seq_node(v, [this](const InnerClassRow& row) { inner_row(row); });
          } else if constexpr (std::is_same_v<T, LineSeqPatch>) {
            seq_node(v, [this](const LineEntry& e) {
              w_.varint(e.instruction);
              w_.varint(e.line);
            });
          } else if constexpr (std::is_same_v<T, FrameSeqPatch>) {
            seq_node(v, [this](const StackMapFrame& f) { frame_value(f); });
          } else if constexpr (std::is_same_v<T, ScalarPatch<Bytes>>) {
            w_.u1(kNodeReplace);
            w_.varint(v->size());
            w_.bytes(*v);
          }
        },
        p.content);
  }

  void code_node(const CodePatch& p) {
    w_.u1(kNodeTuple);
    std::uint64_t mask = 0;
    if (!p.instructions.unchanged()) mask |= 1u << 0;
    if (p.max_stack) mask |= 1u << 1;
    if (p.max_locals) mask |= 1u << 2;
    if (!p.handlers.unchanged()) mask |= 1u << 3;
    if (!p.attributes.unchanged()) mask |= 1u << 4;
    w_.varint(mask);
    if (!p.instructions.unchanged())
      seq_node(p.instructions, [this](const Instruction& in) { instruction_value(in); });
    if (p.max_stack) replace_varint(*p.max_stack);
    if (p.max_locals) replace_varint(*p.max_locals);
    if (!p.handlers.unchanged())
      seq_node(p.handlers, [this](const ExceptionHandler& h) { handler_value(h); },
               [this](const HandlerPatch& hp) { handler_node(hp); });
    if (!p.attributes.unchanged()) attr_set(p.attributes);
  }

  void handler_node(const HandlerPatch& p) {
    w_.u1(kNodeTuple);
    std::uint64_t mask = 0;
    if (p.start) mask |= 1u << 0;
    if (p.end) mask |= 1u << 1;
    if (p.handler) mask |= 1u << 2;
    if (p.catch_type) mask |= 1u << 3;
    w_.varint(mask);
    if (p.start) replace_varint(*p.start);
    if (p.end) replace_varint(*p.end);
    if (p.handler) replace_varint(*p.handler);
    if (p.catch_type) replace_opt_string(*p.catch_type);
  }

  template <typename T, typename ItemPatch, typename WriteItem>
  void seq_node(const SeqPatch<T, ItemPatch>& p, WriteItem write_item) {
    seq_node(p, write_item, [](const ItemPatch&) {});
  }

  template <typename T, typename ItemPatch, typename WriteItem, typename WriteChild>
  void seq_node(const SeqPatch<T, ItemPatch>& p, WriteItem write_item, WriteChild write_child) {
    w_.u1(kNodeSeq);
    w_.varint(p.ops.size());
    for (const auto& op : p.ops) {
      switch (op.kind) {
        case SeqOpKind::Copy:
          w_.u1(kOpCopy);
          w_.varint(op.count);
          break;
        case SeqOpKind::Delete:
          w_.u1(kOpDelete);
          w_.varint(op.count);
          break;
        case SeqOpKind::Insert:
          w_.u1(kOpInsert);
          w_.varint(op.items.size());
          for (const auto& item : op.items) write_item(item);
          break;
        case SeqOpKind::PatchItem:
          w_.u1(kOpPatchItem);
          write_child(op.item_patch);
          break;
      }
    }
  }

  // -- full-value encodings (added subtrees) --

  void instruction_value(const Instruction& in) {
    w_.u1(static_cast<std::uint8_t>(in.op));
    switch (operand_kind(in.op)) {
      case OperandKind::None:
        break;
      case OperandKind::Imm8:
      case OperandKind::Imm16:
        w_.svarint(std::get<Imm>(in.operand).value);
        break;
      case OperandKind::Local:
        w_.varint(std::get<LocalVar>(in.operand).index);
        break;
      case OperandKind::LocalInc: {
        const auto& inc = std::get<IincArgs>(in.operand);
        w_.varint(inc.index);
        w_.svarint(inc.delta);
        break;
      }
      case OperandKind::Const:
      case OperandKind::DynamicRef:
        w_.varint(pool_.index_of(std::get<ConstantValue>(in.operand)));
        break;
      case OperandKind::FieldRef:
      case OperandKind::MethodRef:
      case OperandKind::InterfaceRef: {
        const auto& m = std::get<MemberRef>(in.operand);
        ConstantValue::Tag tag = operand_kind(in.op) == OperandKind::FieldRef
                                     ? ConstantValue::Tag::FieldRef
                                     : operand_kind(in.op) == OperandKind::MethodRef
                                           ? ConstantValue::Tag::MethodRef
                                           : ConstantValue::Tag::InterfaceMethodRef;
        w_.varint(pool_.index_of(ConstantValue::member_ref(tag, m.owner, m.name, m.descriptor)));
        break;
      }
      case OperandKind::Type:
        w_.varint(pool_.index_of_class(std::get<TypeRef>(in.operand).name));
        break;
      case OperandKind::NewArrayType:
        w_.u1(std::get<NewArrayType>(in.operand).atype);
        break;
      case OperandKind::MultiArray: {
        const auto& ma = std::get<MultiArrayArgs>(in.operand);
        w_.varint(pool_.index_of_class(ma.name));
        w_.u1(ma.dims);
        break;
      }
      case OperandKind::Branch:
        w_.varint(std::get<BranchTarget>(in.operand).index);
        break;
      case OperandKind::Switch: {
        const auto& sw = std::get<SwitchTable>(in.operand);
        w_.varint(sw.default_target);
        w_.varint(sw.cases.size());
        for (const auto& [key, target] : sw.cases) {
          w_.svarint(key);
          w_.varint(target);
        }
        break;
      }
      case OperandKind::Internal:
        throw emit_error(errc::unresolved_label, "internal opcode in patch payload");
    }
  }

  void handler_value(const ExceptionHandler& h) {
    w_.varint(h.start);
    w_.varint(h.end);
    w_.varint(h.handler);
    opt_str(h.catch_type);
  }

  void inner_row(const InnerClassRow& row) {
    opt_str(row.inner);
    opt_str(row.outer);
    opt_str(row.inner_name);
    w_.varint(row.flags);
  }

  void vtype_value(const VerificationType& vt) {
    w_.u1(static_cast<std::uint8_t>(vt.kind));
    if (vt.kind == VerificationType::Kind::Object) str(vt.class_name);
    else if (vt.kind == VerificationType::Kind::Uninitialized) w_.varint(vt.new_instruction);
  }

  void frame_value(const StackMapFrame& f) {
    w_.u1(static_cast<std::uint8_t>(f.kind));
    w_.varint(f.at_instruction);
    switch (f.kind) {
      case StackMapFrame::Kind::Same:
        break;
      case StackMapFrame::Kind::SameLocals1:
        vtype_value(f.stack.at(0));
        break;
      case StackMapFrame::Kind::Chop:
        w_.u1(f.chop_count);
        break;
      case StackMapFrame::Kind::Append:
        w_.varint(f.locals.size());
        for (const auto& vt : f.locals) vtype_value(vt);
        break;
      case StackMapFrame::Kind::Full:
        w_.varint(f.locals.size());
        for (const auto& vt : f.locals) vtype_value(vt);
        w_.varint(f.stack.size());
        for (const auto& vt : f.stack) vtype_value(vt);
        break;
    }
  }

  /// Standalone added attribute. Complete methods and fields ride in JVM
  /// format, but a lone Code/LineNumberTable/StackMapTable value cannot: its
  /// byte offsets would depend on a code layout that only exists after the
  /// patch is applied. These use the index-based value forms instead.
  void attr_value(const AttributeAst& a) {
    str(a.name);
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, CodeAst>) {
            w_.varint(v.max_stack);
            w_.varint(v.max_locals);
            w_.varint(v.instructions.size());
            for (const auto& in : v.instructions) instruction_value(in);
            w_.varint(v.handlers.size());
            for (const auto& h : v.handlers) handler_value(h);
            w_.varint(v.attributes.size());
            auto view = sorted_view(v.attributes);
            for (const auto* sub : view) attr_value(*sub);
          } else if constexpr (std::is_same_v<T, ExceptionsAttr>) {
            w_.varint(v.types.size());
            for (const auto& t : v.types) str(t);
          } else if constexpr (std::is_same_v<T, ConstantValueAttr>) {
            w_.varint(pool_.index_of(v.value));
          } else if constexpr (std::is_same_v<T, SourceFileAttr>) {
            str(v.file);
          } else if constexpr (std::is_same_v<T, SignatureAttr>) {
            str(v.signature);
          } else if constexpr (std::is_same_v<T, InnerClassesAttr>) {
            w_.varint(v.rows.size());
            for (const auto& row : v.rows) inner_row(row);
          } else if constexpr (std::is_same_v<T, LineNumberTableAttr>) {
            w_.varint(v.lines.size());
            for (const auto& e : v.lines) {
              w_.varint(e.instruction);
              w_.varint(e.line);
            }
          } else if constexpr (std::is_same_v<T, StackMapTableAttr>) {
            w_.varint(v.frames.size());
            for (const auto& f : v.frames) frame_value(f);
          } else if constexpr (std::is_same_v<T, FlagAttr>) {
            // presence only
          } else if constexpr (std::is_same_v<T, OpaqueAttr>) {
            w_.varint(v.bytes.size());
            w_.bytes(v.bytes);
          }
        },
        a.content);
  }

  ByteWriter& w_;
  const PoolLayout& pool_;
};

// ----- decoding -------------------------------------------------------------

class PatchDecoder {
 public:
  PatchDecoder(ByteReader& r, const ResolvedPool& pool) : r_(r), pool_(pool) {}

  ClassPatch class_node() {
    std::uint8_t tag = r_.u1();
    ClassPatch p;
    if (tag == kNodeUnchanged) return p;
    if (tag != kNodeTuple)
      throw parse_error(errc::unknown_node_tag, r_.pos() - 1, "expected class tuple node");
    std::uint64_t mask = r_.varint();
    if (mask & 1u << 0) p.class_type = replace_string();
    if (mask & 1u << 1) p.superclass = replace_opt_string();
    if (mask & 1u << 2) p.interfaces = interface_set();
    if (mask & 1u << 3) p.fields = field_set();
    if (mask & 1u << 4) p.methods = method_set();
    if (mask & 1u << 5) p.constants = const_set();
    if (mask & 1u << 6) p.attributes = attr_set(AttrContext::Class);
    if (mask & 1u << 7) p.version = static_cast<std::uint32_t>(replace_varint());
    if (mask & 1u << 8) p.flags = static_cast<std::uint16_t>(replace_varint());
    if (mask >> 9)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "unknown bits in class tuple mask");
    return p;
  }

 private:
  void expect(std::uint8_t tag, const char* what) {
    std::uint8_t got = r_.u1();
    if (got != tag)
      throw parse_error(errc::unknown_node_tag, r_.pos() - 1,
                        std::string("expected ") + what + " node");
  }

  std::uint64_t replace_varint() {
    expect(kNodeReplace, "replace");
    return r_.varint();
  }

  std::string replace_string() {
    expect(kNodeReplace, "replace");
    return str();
  }

  std::optional<std::string> replace_opt_string() {
    expect(kNodeReplace, "replace");
    return opt_str();
  }

  std::uint16_t pool_idx() {
    std::uint64_t v = r_.varint();
    if (v == 0 || v > 65535)
      throw parse_error(errc::bad_pool_reference, r_.pos(), "patch pool index out of range");
    return static_cast<std::uint16_t>(v);
  }

  std::string str() { return pool_.utf8_at(pool_idx(), r_.pos()); }

  std::optional<std::string> opt_str() {
    std::uint64_t v = r_.varint();
    if (v == 0) return std::nullopt;
    if (v > 65535)
      throw parse_error(errc::bad_pool_reference, r_.pos(), "patch pool index out of range");
    return pool_.utf8_at(static_cast<std::uint16_t>(v), r_.pos());
  }

  InterfaceSetPatch interface_set() {
    expect(kNodeSet, "set");
    InterfaceSetPatch p;
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.removed.push_back(str());
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.added.push_back(str());
    if (r_.varint() != 0)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "interface members cannot be patched");
    return p;
  }

  ConstSetPatch const_set() {
    expect(kNodeSet, "set");
    ConstSetPatch p;
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.removed.push_back(pool_.at(pool_idx(), r_.pos()));
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.added.push_back(pool_.at(pool_idx(), r_.pos()));
    if (r_.varint() != 0)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "constants cannot be patched");
    return p;
  }

  FieldSetPatch field_set() {
    expect(kNodeSet, "set");
    FieldSetPatch p;
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.removed.push_back(str());
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.added.push_back(parse_field(r_, pool_));
    for (std::uint64_t n = r_.varint(); n > 0; --n) {
      std::string key = str();
      p.patched.emplace_back(std::move(key), field_node());
    }
    return p;
  }

  MethodSetPatch method_set() {
    expect(kNodeSet, "set");
    MethodSetPatch p;
    for (std::uint64_t n = r_.varint(); n > 0; --n) {
      std::string name = str();
      p.removed.push_back(Signature::from_descriptor(std::move(name), str(), r_.pos()));
    }
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.added.push_back(parse_method(r_, pool_));
    for (std::uint64_t n = r_.varint(); n > 0; --n) {
      std::string name = str();
      Signature key = Signature::from_descriptor(std::move(name), str(), r_.pos());
      p.patched.emplace_back(std::move(key), method_node());
    }
    return p;
  }

  FieldPatch field_node() {
    expect(kNodeTuple, "field tuple");
    FieldPatch p;
    std::uint64_t mask = r_.varint();
    if (mask & 1u << 0) p.type = parse_field_descriptor(replace_string(), r_.pos());
    if (mask & 1u << 1) p.flags = static_cast<std::uint16_t>(replace_varint());
    if (mask & 1u << 2) p.attributes = attr_set(AttrContext::Field);
    if (mask >> 3)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "unknown bits in field tuple mask");
    return p;
  }

  MethodPatch method_node() {
    expect(kNodeTuple, "method tuple");
    MethodPatch p;
    std::uint64_t mask = r_.varint();
    if (mask & 1u << 0) p.flags = static_cast<std::uint16_t>(replace_varint());
    if (mask & 1u << 1) p.attributes = attr_set(AttrContext::Method);
    if (mask >> 2)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "unknown bits in method tuple mask");
    return p;
  }

  AttrSetPatch attr_set(AttrContext ctx) {
    expect(kNodeSet, "set");
    AttrSetPatch p;
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.removed.push_back(str());
    for (std::uint64_t n = r_.varint(); n > 0; --n) p.added.push_back(attr_value(ctx));
    for (std::uint64_t n = r_.varint(); n > 0; --n) {
      std::string key = str();
      AttributePatch child = attr_node(key, ctx);
      p.patched.emplace_back(std::move(key), std::move(child));
    }
    return p;
  }

  AttributePatch attr_node(const std::string& name, AttrContext ctx) {
    AttributePatch p;
    switch (attribute_kind(name, ctx)) {
      case AttrKind::Code:
        p.content = code_node();
        break;
      case AttrKind::Exceptions:
        p.content = seq_node<std::string>([this] { return str(); });
        break;
      case AttrKind::ConstVal: {
        expect(kNodeReplace, "replace");
        p.content = ScalarPatch<ConstantValue>(pool_.at(pool_idx(), r_.pos()));
        break;
      }
      case AttrKind::SourceFile:
      case AttrKind::Signature:
        p.content = ScalarPatch<std::string>(replace_string());
        break;
      case AttrKind::InnerClasses:
        p.content = seq_node<InnerClassRow>([this] { return inner_row(); });
        break;
      case AttrKind::LineNumberTable:
        p.content = seq_node<LineEntry>([this] {
          LineEntry e;
          e.instruction = static_cast<std::uint32_t>(r_.varint());
          e.line = static_cast<std::uint32_t>(r_.varint());
          return e;
        });
        break;
      case AttrKind::StackMapTable:
        p.content = seq_node<StackMapFrame>([this] { return frame_value(); });
        break;
      case AttrKind::Flag:
        throw parse_error(errc::unknown_node_tag, r_.pos(), "flag attribute cannot be patched");
      case AttrKind::Opaque: {
        expect(kNodeReplace, "replace");
        std::uint64_t len = r_.varint();
        auto body = r_.bytes(len);
        p.content = ScalarPatch<Bytes>(Bytes(body.begin(), body.end()));
        break;
      }
    }
    return p;
  }

  CodePatch code_node() {
    expect(kNodeTuple, "code tuple");
    CodePatch p;
    std::uint64_t mask = r_.varint();
    if (mask & 1u << 0)
      p.instructions = seq_node<Instruction>([this] { return instruction_value(); });
    if (mask & 1u << 1) p.max_stack = static_cast<std::uint16_t>(replace_varint());
    if (mask & 1u << 2) p.max_locals = static_cast<std::uint16_t>(replace_varint());
    if (mask & 1u << 3)
      p.handlers = seq_node<ExceptionHandler, HandlerPatch>([this] { return handler_value(); },
                                                            [this] { return handler_node(); });
    if (mask & 1u << 4) p.attributes = attr_set(AttrContext::Code);
    if (mask >> 5)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "unknown bits in code tuple mask");
    return p;
  }

  HandlerPatch handler_node() {
    expect(kNodeTuple, "handler tuple");
    HandlerPatch p;
    std::uint64_t mask = r_.varint();
    if (mask & 1u << 0) p.start = static_cast<std::uint32_t>(replace_varint());
    if (mask & 1u << 1) p.end = static_cast<std::uint32_t>(replace_varint());
    if (mask & 1u << 2) p.handler = static_cast<std::uint32_t>(replace_varint());
    if (mask & 1u << 3) p.catch_type = replace_opt_string();
    if (mask >> 4)
      throw parse_error(errc::unknown_node_tag, r_.pos(), "unknown bits in handler tuple mask");
    return p;
  }

  template <typename T, typename ItemPatch = std::monostate, typename ReadItem,
            typename ReadChild>
  SeqPatch<T, ItemPatch> seq_node(ReadItem read_item, ReadChild read_child) {
    expect(kNodeSeq, "sequence");
    SeqPatch<T, ItemPatch> p;
    std::uint64_t nops = r_.varint();
    for (std::uint64_t i = 0; i < nops; ++i) {
      typename SeqPatch<T, ItemPatch>::Op op;
      std::uint8_t kind = r_.u1();
      if (kind == kOpCopy) {
        op.kind = SeqOpKind::Copy;
        op.count = static_cast<std::uint32_t>(r_.varint());
      } else if (kind == kOpDelete) {
        op.kind = SeqOpKind::Delete;
        op.count = static_cast<std::uint32_t>(r_.varint());
      } else if (kind == kOpInsert) {
        op.kind = SeqOpKind::Insert;
        std::uint64_t n = r_.varint();
        for (std::uint64_t j = 0; j < n; ++j) op.items.push_back(read_item());
      } else if (kind == kOpPatchItem) {
        op.kind = SeqOpKind::PatchItem;
        op.item_patch = read_child();
      } else {
        throw parse_error(errc::unknown_node_tag, r_.pos() - 1, "unknown sequence op kind");
      }
      p.ops.push_back(std::move(op));
    }
    return p;
  }

  template <typename T, typename ReadItem>
  SeqPatch<T> seq_node(ReadItem read_item) {
    return seq_node<T, std::monostate>(read_item, [this]() -> std::monostate {
      throw parse_error(errc::unknown_node_tag, r_.pos(), "sequence does not support item patches");
    });
  }

  Instruction instruction_value() {
    std::uint8_t op_byte = r_.u1();
    const OpcodeInfo* info = opcode_info(op_byte);
    if (info == nullptr || info->operand == OperandKind::Internal)
      throw parse_error(errc::unknown_opcode, r_.pos() - 1,
                        "invalid opcode in patch payload: " + std::to_string(op_byte));
    Instruction in;
    in.op = static_cast<Opcode>(op_byte);
    switch (info->operand) {
      case OperandKind::None:
        break;
      case OperandKind::Imm8:
      case OperandKind::Imm16:
        in.operand = Imm{static_cast<std::int32_t>(r_.svarint())};
        break;
      case OperandKind::Local:
        in.operand = LocalVar{static_cast<std::uint16_t>(r_.varint())};
        break;
      case OperandKind::LocalInc: {
        IincArgs inc;
        inc.index = static_cast<std::uint16_t>(r_.varint());
        inc.delta = static_cast<std::int32_t>(r_.svarint());
        in.operand = inc;
        break;
      }
      case OperandKind::Const:
        in.operand = pool_.at(pool_idx(), r_.pos());
        break;
      case OperandKind::DynamicRef:
        in.operand = pool_.at_tag(pool_idx(), ConstantValue::Tag::InvokeDynamic, r_.pos());
        break;
      case OperandKind::FieldRef:
        in.operand = to_member_ref(pool_.at_tag(pool_idx(), ConstantValue::Tag::FieldRef, r_.pos()));
        break;
      case OperandKind::MethodRef:
        in.operand = to_member_ref(pool_.at_tag(pool_idx(), ConstantValue::Tag::MethodRef, r_.pos()));
        break;
      case OperandKind::InterfaceRef:
        in.operand =
            to_member_ref(pool_.at_tag(pool_idx(), ConstantValue::Tag::InterfaceMethodRef, r_.pos()));
        break;
      case OperandKind::Type:
        in.operand = TypeRef{pool_.class_name_at(pool_idx(), r_.pos())};
        break;
      case OperandKind::NewArrayType:
        in.operand = NewArrayType{r_.u1()};
        break;
      case OperandKind::MultiArray: {
        MultiArrayArgs ma;
        ma.name = pool_.class_name_at(pool_idx(), r_.pos());
        ma.dims = r_.u1();
        in.operand = ma;
        break;
      }
      case OperandKind::Branch:
        in.operand = BranchTarget{static_cast<std::uint32_t>(r_.varint())};
        break;
      case OperandKind::Switch: {
        SwitchTable sw;
        sw.default_target = static_cast<std::uint32_t>(r_.varint());
        std::uint64_t n = r_.varint();
        for (std::uint64_t k = 0; k < n; ++k) {
          std::int32_t key = static_cast<std::int32_t>(r_.svarint());
          sw.cases.emplace_back(key, static_cast<std::uint32_t>(r_.varint()));
        }
        in.operand = std::move(sw);
        break;
      }
      case OperandKind::Internal:
        break;
    }
    return in;
  }

  ExceptionHandler handler_value() {
    ExceptionHandler h;
    h.start = static_cast<std::uint32_t>(r_.varint());
    h.end = static_cast<std::uint32_t>(r_.varint());
    h.handler = static_cast<std::uint32_t>(r_.varint());
    h.catch_type = opt_str();
    return h;
  }

  InnerClassRow inner_row() {
    InnerClassRow row;
    row.inner = opt_str();
    row.outer = opt_str();
    row.inner_name = opt_str();
    row.flags = static_cast<std::uint16_t>(r_.varint());
    return row;
  }

  VerificationType vtype_value() {
    VerificationType vt;
    std::uint8_t kind = r_.u1();
    if (kind > 8)
      throw parse_error(errc::unknown_node_tag, r_.pos() - 1, "unknown verification type");
    vt.kind = static_cast<VerificationType::Kind>(kind);
    if (vt.kind == VerificationType::Kind::Object) vt.class_name = str();
    else if (vt.kind == VerificationType::Kind::Uninitialized)
      vt.new_instruction = static_cast<std::uint32_t>(r_.varint());
    return vt;
  }

  StackMapFrame frame_value() {
    StackMapFrame f;
    std::uint8_t kind = r_.u1();
    if (kind > 4) throw parse_error(errc::unknown_node_tag, r_.pos() - 1, "unknown frame kind");
    f.kind = static_cast<StackMapFrame::Kind>(kind);
    f.at_instruction = static_cast<std::uint32_t>(r_.varint());
    switch (f.kind) {
      case StackMapFrame::Kind::Same:
        break;
      case StackMapFrame::Kind::SameLocals1:
        f.stack.push_back(vtype_value());
        break;
      case StackMapFrame::Kind::Chop:
        f.chop_count = r_.u1();
        break;
      case StackMapFrame::Kind::Append:
        for (std::uint64_t n = r_.varint(); n > 0; --n) f.locals.push_back(vtype_value());
        break;
      case StackMapFrame::Kind::Full:
        for (std::uint64_t n = r_.varint(); n > 0; --n) f.locals.push_back(vtype_value());
        for (std::uint64_t n = r_.varint(); n > 0; --n) f.stack.push_back(vtype_value());
        break;
    }
    return f;
  }

  AttributeAst attr_value(AttrContext ctx) {
    AttributeAst a;
    a.name = str();
    switch (attribute_kind(a.name, ctx)) {
      case AttrKind::Code: {
        CodeAst code;
        code.max_stack = static_cast<std::uint16_t>(r_.varint());
        code.max_locals = static_cast<std::uint16_t>(r_.varint());
        for (std::uint64_t n = r_.varint(); n > 0; --n)
          code.instructions.push_back(instruction_value());
        for (std::uint64_t n = r_.varint(); n > 0; --n) code.handlers.push_back(handler_value());
        for (std::uint64_t n = r_.varint(); n > 0; --n)
          code.attributes.push_back(attr_value(AttrContext::Code));
        a.content = std::move(code);
        break;
      }
      case AttrKind::Exceptions: {
        ExceptionsAttr exc;
        for (std::uint64_t n = r_.varint(); n > 0; --n) exc.types.push_back(str());
        a.content = std::move(exc);
        break;
      }
      case AttrKind::ConstVal:
        a.content = ConstantValueAttr{pool_.at(pool_idx(), r_.pos())};
        break;
      case AttrKind::SourceFile:
        a.content = SourceFileAttr{str()};
        break;
      case AttrKind::Signature:
        a.content = SignatureAttr{str()};
        break;
      case AttrKind::InnerClasses: {
        InnerClassesAttr ic;
        for (std::uint64_t n = r_.varint(); n > 0; --n) ic.rows.push_back(inner_row());
        a.content = std::move(ic);
        break;
      }
      case AttrKind::LineNumberTable: {
        LineNumberTableAttr lnt;
        for (std::uint64_t n = r_.varint(); n > 0; --n) {
          LineEntry e;
          e.instruction = static_cast<std::uint32_t>(r_.varint());
          e.line = static_cast<std::uint32_t>(r_.varint());
          lnt.lines.push_back(e);
        }
        a.content = std::move(lnt);
        break;
      }
      case AttrKind::StackMapTable: {
        StackMapTableAttr smt;
        for (std::uint64_t n = r_.varint(); n > 0; --n) smt.frames.push_back(frame_value());
        a.content = std::move(smt);
        break;
      }
      case AttrKind::Flag:
        a.content = FlagAttr{};
        break;
      case AttrKind::Opaque: {
        std::uint64_t len = r_.varint();
        auto body = r_.bytes(len);
        a.content = OpaqueAttr{Bytes(body.begin(), body.end())};
        break;
      }
    }
    return a;
  }

  ByteReader& r_;
  const ResolvedPool& pool_;
};

inline void write_class_patch_body(ByteWriter& w, const ClassPatch& p, const std::string& name) {
  w.varint(name.size());
  w.str(name);
  PoolLayout pool = PoolLayout::from_constants(gather_class_patch_constants(p));
  pool.write(w);
  PatchEncoder(w, pool).class_node(p);
}

inline std::pair<std::string, ClassPatch> read_class_patch_body(ByteReader& r) {
  std::uint64_t len = r.varint();
  std::string name = r.str(len);
  ResolvedPool pool = parse_pool(r);
  ClassPatch p = PatchDecoder(r, pool).class_node();
  return {std::move(name), std::move(p)};
}

}  // namespace detail

/// A decoded patch file: either one class patch (with the class name it was
/// derived for) or an archive-level patch.
struct DecodedPatch {
  std::variant<std::pair<std::string, ClassPatch>, ArchivePatch> body;

  bool is_archive() const { return std::holds_alternative<ArchivePatch>(body); }
  const ArchivePatch& archive() const { return std::get<ArchivePatch>(body); }
  const std::string& class_name() const {
    return std::get<std::pair<std::string, ClassPatch>>(body).first;
  }
  const ClassPatch& class_patch() const {
    return std::get<std::pair<std::string, ClassPatch>>(body).second;
  }
};

namespace detail {

inline Bytes seal_patch(Bytes body, bool compress) {
  ByteWriter w;
  w.str(std::string_view(kPatchMagic, 4));
  w.u2(kPatchFormatVersion);
  if (compress) {
    Bytes deflated = deflate_bytes(body);
    if (deflated.size() < body.size()) {
      w.u1(1);
      w.bytes(deflated);
      return w.take();
    }
  }
  w.u1(0);
  w.bytes(body);
  return w.take();
}

}  // namespace detail

/// Encodes a single-class patch. Deterministic: equal patch trees produce
/// identical bytes. With `compress`, the body is deflated when that shrinks
/// it (the header byte records which form was written).
inline Bytes encode_patch(const ClassPatch& p, const std::string& class_name, bool compress) {
  ByteWriter body;
  body.u1(kBodyClass);
  detail::write_class_patch_body(body, p, class_name);
  return detail::seal_patch(body.take(), compress);
}

/// Encodes an archive-level patch: per-class sections (each with its own
/// mini pool), added classes as complete class files, and whole-file deltas
/// for non-class entries.
inline Bytes encode_patch(const ArchivePatch& p, bool compress) {
  ByteWriter body;
  body.u1(kBodyArchive);
  body.varint(p.patched.size());
  for (const auto& [name, cp] : p.patched) detail::write_class_patch_body(body, cp, name);
  body.varint(p.added.size());
  for (const auto& [name, ast] : p.added) {
    body.varint(name.size());
    body.str(name);
    Bytes cls = emit_class(ast);
    body.varint(cls.size());
    body.bytes(cls);
  }
  body.varint(p.removed.size());
  for (const auto& name : p.removed) {
    body.varint(name.size());
    body.str(name);
  }
  body.varint(p.other_entries.size());
  for (const auto& [name, delta] : p.other_entries) {
    body.varint(name.size());
    body.str(name);
    body.u1(static_cast<std::uint8_t>(delta.kind));
    if (delta.kind != ArchivePatch::ResourceDelta::Kind::Removed) {
      body.varint(delta.bytes.size());
      body.bytes(delta.bytes);
    }
  }
  return detail::seal_patch(body.take(), compress);
}

/// Decodes a patch file produced by encode_patch.
inline DecodedPatch decode_patch(std::span<const std::uint8_t> data) {
  ByteReader header(data, errc::truncated_patch);
  if (header.remaining() < 4 || header.str(4) != std::string_view(kPatchMagic, 4))
    throw parse_error(errc::bad_magic, 0, "not a patch file (bad magic)");
  std::uint16_t version = header.u2();
  if (version != kPatchFormatVersion)
    throw parse_error(errc::unsupported_format_version, 4,
                      "unsupported patch format version " + std::to_string(version));
  std::uint8_t compression = header.u1();
  Bytes inflated;
  std::span<const std::uint8_t> body_span;
  if (compression == 0) {
    body_span = std::span<const std::uint8_t>(data.data() + header.pos(), data.size() - header.pos());
  } else if (compression == 1) {
    inflated = inflate_bytes(
        std::span<const std::uint8_t>(data.data() + header.pos(), data.size() - header.pos()),
        errc::truncated_patch);
    body_span = inflated;
  } else {
    throw parse_error(errc::unsupported_format_version, 6,
                      "unknown compression byte " + std::to_string(compression));
  }

  ByteReader r(body_span, errc::truncated_patch);
  std::uint8_t kind = r.u1();
  DecodedPatch out;
  if (kind == kBodyClass) {
    out.body = detail::read_class_patch_body(r);
  } else if (kind == kBodyArchive) {
    ArchivePatch p;
    for (std::uint64_t n = r.varint(); n > 0; --n) {
      auto [name, cp] = detail::read_class_patch_body(r);
      p.patched.emplace(std::move(name), std::move(cp));
    }
    for (std::uint64_t n = r.varint(); n > 0; --n) {
      std::string name = r.str(r.varint());
      std::uint64_t len = r.varint();
      auto cls = r.bytes(len);
      p.added.emplace(std::move(name), parse_class(cls));
    }
    for (std::uint64_t n = r.varint(); n > 0; --n) p.removed.insert(r.str(r.varint()));
    for (std::uint64_t n = r.varint(); n > 0; --n) {
      std::string name = r.str(r.varint());
      ArchivePatch::ResourceDelta delta;
      std::uint8_t dk = r.u1();
      if (dk > 2)
        throw parse_error(errc::unknown_node_tag, r.pos() - 1, "unknown resource delta kind");
      delta.kind = static_cast<ArchivePatch::ResourceDelta::Kind>(dk);
      if (delta.kind != ArchivePatch::ResourceDelta::Kind::Removed) {
        std::uint64_t len = r.varint();
        auto bytes = r.bytes(len);
        delta.bytes.assign(bytes.begin(), bytes.end());
      }
      p.other_entries.emplace(std::move(name), std::move(delta));
    }
    out.body = std::move(p);
  } else {
    throw parse_error(errc::unknown_node_tag, r.pos() - 1,
                      "unknown patch body kind " + std::to_string(kind));
  }
  if (!r.at_end())
    throw parse_error(errc::truncated_patch, r.pos(), "trailing bytes after patch body");
  return out;
}

inline DecodedPatch decode_patch(const Bytes& data) {
  return decode_patch(std::span<const std::uint8_t>(data.data(), data.size()));
}

}  // namespace aspa
#endif  // ASPA_PATCH_IO_HPP
