#ifndef ASPA_CLASSFILE_WRITE_HPP
#define ASPA_CLASSFILE_WRITE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/bytes.hpp"
#include "aspa/classfile_read.hpp"
#include "aspa/error.hpp"
#include "aspa/pool.hpp"

namespace aspa {

namespace detail {

/// Opaque attributes we know to contain constant-pool indexes (or code
/// offsets) cannot survive a pool rebuild; emitting them would corrupt the
/// file, so emit refuses instead.
inline bool opaque_attribute_relocatable(std::string_view name) {
  static constexpr std::string_view kRejected[] = {
      // known index-bearing attributes we keep opaque
      "RuntimeVisibleAnnotations", "RuntimeInvisibleAnnotations",
      "RuntimeVisibleParameterAnnotations", "RuntimeInvisibleParameterAnnotations",
      "RuntimeVisibleTypeAnnotations", "RuntimeInvisibleTypeAnnotations",
      "AnnotationDefault", "BootstrapMethods", "EnclosingMethod", "LocalVariableTable",
      "LocalVariableTypeTable", "MethodParameters", "NestHost", "NestMembers",
      "PermittedSubclasses", "Record", "Module", "ModulePackages", "ModuleMainClass",
      // structured names showing up opaque means they sit in the wrong context
      "Code", "Exceptions", "ConstantValue", "SourceFile", "Signature", "InnerClasses",
      "LineNumberTable", "StackMapTable",
  };
  for (auto r : kRejected)
    if (name == r) return false;
  return true;
}

struct CodeLayout {
  std::vector<std::uint32_t> offsets;
  std::uint32_t total = 0;
  std::vector<bool> wide_branch;
};

inline std::uint32_t instruction_size(const Instruction& in, std::uint32_t offset, bool wide_branch,
                                      const PoolLayout& pool) {
  switch (operand_kind(in.op)) {
    case OperandKind::None:
      return 1;
    case OperandKind::Imm8:
      return 2;
    case OperandKind::Imm16:
      return 3;
    case OperandKind::Local:
      return std::get<LocalVar>(in.operand).index > 255 ? 4 : 2;
    case OperandKind::LocalInc: {
      const auto& inc = std::get<IincArgs>(in.operand);
      return (inc.index > 255 || inc.delta < -128 || inc.delta > 127) ? 6 : 3;
    }
    case OperandKind::Const: {
      if (in.op == Opcode::ldc2_w) return 3;
      return pool.index_of(std::get<ConstantValue>(in.operand)) <= 255 ? 2 : 3;
    }
    case OperandKind::FieldRef:
    case OperandKind::MethodRef:
    case OperandKind::Type:
      return 3;
    case OperandKind::InterfaceRef:
    case OperandKind::DynamicRef:
      return 5;
    case OperandKind::NewArrayType:
      return 2;
    case OperandKind::MultiArray:
      return 4;
    case OperandKind::Branch:
      return wide_branch ? 5 : 3;
    case OperandKind::Switch: {
      std::uint32_t pad = (4 - (offset + 1) % 4) % 4;
      const auto& sw = std::get<SwitchTable>(in.operand);
      if (in.op == Opcode::tableswitch)
        return 1 + pad + 12 + 4 * static_cast<std::uint32_t>(sw.cases.size());
      return 1 + pad + 8 + 8 * static_cast<std::uint32_t>(sw.cases.size());
    }
    case OperandKind::Internal:
      break;
  }
  throw emit_error(errc::unresolved_label,
                   std::string("cannot encode internal opcode ") + mnemonic(in.op));
}

/// Assigns byte offsets, widening goto/jsr until every branch fits. The set
/// of wide branches only grows, so the loop terminates.
inline CodeLayout layout_code(const std::vector<Instruction>& ins, const PoolLayout& pool) {
  const std::size_t n = ins.size();
  CodeLayout layout;
  layout.wide_branch.assign(n, false);
  auto target_of = [&](std::uint32_t idx) -> std::uint32_t {
    if (idx >= n)
      throw emit_error(errc::unresolved_label,
                       "branch target " + std::to_string(idx) + " out of range");
    return idx;
  };
  while (true) {
    layout.offsets.assign(n, 0);
    std::uint32_t off = 0;
    for (std::size_t i = 0; i < n; ++i) {
      layout.offsets[i] = off;
      off += instruction_size(ins[i], off, layout.wide_branch[i], pool);
    }
    layout.total = off;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (operand_kind(ins[i].op) != OperandKind::Branch) continue;
      const auto& b = std::get<BranchTarget>(ins[i].operand);
      std::int64_t rel = static_cast<std::int64_t>(layout.offsets[target_of(b.index)]) -
                         layout.offsets[i];
      bool fits = rel >= -32768 && rel <= 32767;
      if (!fits && !layout.wide_branch[i]) {
        if (ins[i].op == Opcode::goto_ || ins[i].op == Opcode::jsr) {
          layout.wide_branch[i] = true;
          changed = true;
        } else {
          throw emit_error(errc::branch_offset_overflow,
                           std::string(mnemonic(ins[i].op)) +
                               " offset does not fit in 16 bits and has no wide form");
        }
      }
    }
    if (!changed) break;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (auto* sw = std::get_if<SwitchTable>(&ins[i].operand)) {
      target_of(sw->default_target);
      for (const auto& [key, t] : sw->cases) target_of(t);
    }
  }
  if (layout.total > 65535)
    throw emit_error(errc::code_length_overflow,
                     "code array of " + std::to_string(layout.total) + " bytes exceeds 65535");
  return layout;
}

inline void write_code_array(ByteWriter& w, const std::vector<Instruction>& ins,
                             const PoolLayout& pool, const CodeLayout& layout) {
  const std::size_t base = w.size();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const Instruction& in = ins[i];
    const std::uint32_t at = layout.offsets[i];
    switch (operand_kind(in.op)) {
      case OperandKind::None:
        w.u1(static_cast<std::uint8_t>(in.op));
        break;
      case OperandKind::Imm8:
        w.u1(static_cast<std::uint8_t>(in.op));
        w.s1(static_cast<std::int8_t>(std::get<Imm>(in.operand).value));
        break;
      case OperandKind::Imm16:
        w.u1(static_cast<std::uint8_t>(in.op));
        w.s2(static_cast<std::int16_t>(std::get<Imm>(in.operand).value));
        break;
      case OperandKind::Local: {
        std::uint16_t idx = std::get<LocalVar>(in.operand).index;
        if (idx > 255) {
          w.u1(static_cast<std::uint8_t>(Opcode::wide));
          w.u1(static_cast<std::uint8_t>(in.op));
          w.u2(idx);
        } else {
          w.u1(static_cast<std::uint8_t>(in.op));
          w.u1(static_cast<std::uint8_t>(idx));
        }
        break;
      }
      case OperandKind::LocalInc: {
        const auto& inc = std::get<IincArgs>(in.operand);
        if (inc.index > 255 || inc.delta < -128 || inc.delta > 127) {
          w.u1(static_cast<std::uint8_t>(Opcode::wide));
          w.u1(static_cast<std::uint8_t>(Opcode::iinc));
          w.u2(inc.index);
          w.s2(static_cast<std::int16_t>(inc.delta));
        } else {
          w.u1(static_cast<std::uint8_t>(Opcode::iinc));
          w.u1(static_cast<std::uint8_t>(inc.index));
          w.s1(static_cast<std::int8_t>(inc.delta));
        }
        break;
      }
      case OperandKind::Const: {
        std::uint16_t idx = pool.index_of(std::get<ConstantValue>(in.operand));
        if (in.op == Opcode::ldc2_w) {
          w.u1(static_cast<std::uint8_t>(Opcode::ldc2_w));
          w.u2(idx);
        } else if (idx <= 255) {
          w.u1(static_cast<std::uint8_t>(Opcode::ldc));
          w.u1(static_cast<std::uint8_t>(idx));
        } else {
          w.u1(static_cast<std::uint8_t>(Opcode::ldc_w));
          w.u2(idx);
        }
        break;
      }
      case OperandKind::FieldRef:
      case OperandKind::MethodRef:
      case OperandKind::InterfaceRef: {
        const auto& m = std::get<MemberRef>(in.operand);
        ConstantValue::Tag tag = operand_kind(in.op) == OperandKind::FieldRef
                                     ? ConstantValue::Tag::FieldRef
                                     : operand_kind(in.op) == OperandKind::MethodRef
                                           ? ConstantValue::Tag::MethodRef
                                           : ConstantValue::Tag::InterfaceMethodRef;
        std::uint16_t idx = pool.index_of(ConstantValue::member_ref(tag, m.owner, m.name, m.descriptor));
        w.u1(static_cast<std::uint8_t>(in.op));
        w.u2(idx);
        if (in.op == Opcode::invokeinterface) {
          auto [args, ret] = parse_method_descriptor(m.descriptor);
          std::uint32_t slots = 1;  // receiver
          for (const auto& a : args)
            slots += (a.dims == 0 && (a.base == BaseType::Long || a.base == BaseType::Double)) ? 2 : 1;
          w.u1(static_cast<std::uint8_t>(slots));
          w.u1(0);
        }
        break;
      }
      case OperandKind::DynamicRef: {
        w.u1(static_cast<std::uint8_t>(in.op));
        w.u2(pool.index_of(std::get<ConstantValue>(in.operand)));
        w.u1(0);
        w.u1(0);
        break;
      }
      case OperandKind::Type:
        w.u1(static_cast<std::uint8_t>(in.op));
        w.u2(pool.index_of_class(std::get<TypeRef>(in.operand).name));
        break;
      case OperandKind::NewArrayType:
        w.u1(static_cast<std::uint8_t>(in.op));
        w.u1(std::get<NewArrayType>(in.operand).atype);
        break;
      case OperandKind::MultiArray: {
        const auto& ma = std::get<MultiArrayArgs>(in.operand);
        w.u1(static_cast<std::uint8_t>(in.op));
        w.u2(pool.index_of_class(ma.name));
        w.u1(ma.dims);
        break;
      }
      case OperandKind::Branch: {
        const auto& b = std::get<BranchTarget>(in.operand);
        std::int64_t rel = static_cast<std::int64_t>(layout.offsets[b.index]) - at;
        if (layout.wide_branch[i]) {
          w.u1(static_cast<std::uint8_t>(in.op == Opcode::goto_ ? Opcode::goto_w : Opcode::jsr_w));
          w.s4(static_cast<std::int32_t>(rel));
        } else {
          w.u1(static_cast<std::uint8_t>(in.op));
          w.s2(static_cast<std::int16_t>(rel));
        }
        break;
      }
      case OperandKind::Switch: {
        const auto& sw = std::get<SwitchTable>(in.operand);
        w.u1(static_cast<std::uint8_t>(in.op));
        while ((w.size() - base) % 4 != 0) w.u1(0);
        w.s4(static_cast<std::int32_t>(static_cast<std::int64_t>(layout.offsets[sw.default_target]) - at));
        if (in.op == Opcode::tableswitch) {
          std::int32_t low = sw.cases.empty() ? 0 : sw.cases.front().first;
          std::int32_t high = sw.cases.empty() ? -1 : sw.cases.back().first;
          w.s4(low);
          w.s4(high);
          for (const auto& [key, target] : sw.cases)
            w.s4(static_cast<std::int32_t>(static_cast<std::int64_t>(layout.offsets[target]) - at));
        } else {
          w.s4(static_cast<std::int32_t>(sw.cases.size()));
          for (const auto& [key, target] : sw.cases) {
            w.s4(key);
            w.s4(static_cast<std::int32_t>(static_cast<std::int64_t>(layout.offsets[target]) - at));
          }
        }
        break;
      }
      case OperandKind::Internal:
        throw emit_error(errc::unresolved_label, "internal opcode in instruction stream");
    }
  }
}

inline void write_verification_type(ByteWriter& w, const VerificationType& vt, const PoolLayout& pool,
                                    const CodeLayout& layout) {
  w.u1(static_cast<std::uint8_t>(vt.kind));
  if (vt.kind == VerificationType::Kind::Object) {
    w.u2(pool.index_of_class(vt.class_name));
  } else if (vt.kind == VerificationType::Kind::Uninitialized) {
    if (vt.new_instruction >= layout.offsets.size())
      throw emit_error(errc::unresolved_label, "uninitialized type target out of range");
    w.u2(static_cast<std::uint16_t>(layout.offsets[vt.new_instruction]));
  }
}

inline void write_stack_map(ByteWriter& w, const StackMapTableAttr& smt, const PoolLayout& pool,
                            const CodeLayout& layout) {
  if (smt.frames.size() > 65535)
    throw emit_error(errc::capacity_overflow, "too many stack map frames");
  w.u2(static_cast<std::uint16_t>(smt.frames.size()));
  std::int64_t prev = -1;
  for (const auto& frame : smt.frames) {
    if (frame.at_instruction >= layout.offsets.size())
      throw emit_error(errc::unresolved_label, "stack map frame target out of range");
    std::int64_t offset = layout.offsets[frame.at_instruction];
    std::int64_t delta64 = prev < 0 ? offset : offset - prev - 1;
    if (delta64 < 0 || delta64 > 65535)
      throw emit_error(errc::unresolved_label, "stack map frames not in increasing order");
    std::uint16_t delta = static_cast<std::uint16_t>(delta64);
    prev = offset;
    switch (frame.kind) {
      case StackMapFrame::Kind::Same:
        if (delta <= 63) {
          w.u1(static_cast<std::uint8_t>(delta));
        } else {
          w.u1(251);
          w.u2(delta);
        }
        break;
      case StackMapFrame::Kind::SameLocals1:
        if (delta <= 63) {
          w.u1(static_cast<std::uint8_t>(64 + delta));
        } else {
          w.u1(247);
          w.u2(delta);
        }
        write_verification_type(w, frame.stack.at(0), pool, layout);
        break;
      case StackMapFrame::Kind::Chop:
        w.u1(static_cast<std::uint8_t>(251 - frame.chop_count));
        w.u2(delta);
        break;
      case StackMapFrame::Kind::Append:
        w.u1(static_cast<std::uint8_t>(251 + frame.locals.size()));
        w.u2(delta);
        for (const auto& vt : frame.locals) write_verification_type(w, vt, pool, layout);
        break;
      case StackMapFrame::Kind::Full:
        w.u1(255);
        w.u2(delta);
        w.u2(static_cast<std::uint16_t>(frame.locals.size()));
        for (const auto& vt : frame.locals) write_verification_type(w, vt, pool, layout);
        w.u2(static_cast<std::uint16_t>(frame.stack.size()));
        for (const auto& vt : frame.stack) write_verification_type(w, vt, pool, layout);
        break;
    }
  }
}

void write_attribute(ByteWriter& w, const AttributeAst& a, const PoolLayout& pool, AttrContext ctx,
                     const CodeLayout* layout);

inline void write_attribute_list(ByteWriter& w, const std::vector<AttributeAst>& attrs,
                                 const PoolLayout& pool, AttrContext ctx,
                                 const CodeLayout* layout = nullptr) {
  if (attrs.size() > 65535) throw emit_error(errc::capacity_overflow, "too many attributes");
  auto view = sorted_view(attrs);
  w.u2(static_cast<std::uint16_t>(view.size()));
  for (const auto* a : view) write_attribute(w, *a, pool, ctx, layout);
}

}  // namespace detail

/// Inverse of decode_code: emits a full Code attribute body against the
/// given pool. Narrow branch forms are used wherever the final offsets fit.
inline Bytes encode_code(const CodeAst& code, const PoolLayout& pool) {
  ByteWriter w;
  detail::CodeLayout layout = detail::layout_code(code.instructions, pool);
  w.u2(code.max_stack);
  w.u2(code.max_locals);
  w.u4(layout.total);
  detail::write_code_array(w, code.instructions, pool, layout);
  if (code.handlers.size() > 65535) throw emit_error(errc::capacity_overflow, "too many handlers");
  w.u2(static_cast<std::uint16_t>(code.handlers.size()));
  const std::size_t n = code.instructions.size();
  for (const auto& h : code.handlers) {
    if (h.start >= n || h.end > n || h.handler >= n || h.start >= h.end)
      throw emit_error(errc::unresolved_label, "exception handler range out of bounds");
    w.u2(static_cast<std::uint16_t>(layout.offsets[h.start]));
    w.u2(static_cast<std::uint16_t>(h.end == n ? layout.total : layout.offsets[h.end]));
    w.u2(static_cast<std::uint16_t>(layout.offsets[h.handler]));
    w.u2(h.catch_type ? pool.index_of_class(*h.catch_type) : 0);
  }
  detail::write_attribute_list(w, code.attributes, pool, AttrContext::Code, &layout);
  return w.take();
}

namespace detail {

inline void write_attribute(ByteWriter& w, const AttributeAst& a, const PoolLayout& pool,
                            AttrContext ctx, const CodeLayout* layout) {
  w.u2(pool.index_of_utf8(a.name));
  std::size_t len_at = w.mark_u4();
  std::size_t body_start = w.size();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CodeAst>) {
          Bytes body = encode_code(v, pool);
          w.bytes(body);
        } else if constexpr (std::is_same_v<T, ExceptionsAttr>) {
          w.u2(static_cast<std::uint16_t>(v.types.size()));
          for (const auto& t : v.types) w.u2(pool.index_of_class(t));
        } else if constexpr (std::is_same_v<T, ConstantValueAttr>) {
          w.u2(pool.index_of(v.value));
        } else if constexpr (std::is_same_v<T, SourceFileAttr>) {
          w.u2(pool.index_of_utf8(v.file));
        } else if constexpr (std::is_same_v<T, SignatureAttr>) {
          w.u2(pool.index_of_utf8(v.signature));
        } else if constexpr (std::is_same_v<T, InnerClassesAttr>) {
          w.u2(static_cast<std::uint16_t>(v.rows.size()));
          for (const auto& row : v.rows) {
            w.u2(row.inner ? pool.index_of_class(*row.inner) : 0);
            w.u2(row.outer ? pool.index_of_class(*row.outer) : 0);
            w.u2(row.inner_name ? pool.index_of_utf8(*row.inner_name) : 0);
            w.u2(row.flags);
          }
        } else if constexpr (std::is_same_v<T, LineNumberTableAttr>) {
          w.u2(static_cast<std::uint16_t>(v.lines.size()));
          for (const auto& e : v.lines) {
            if (layout == nullptr || e.instruction >= layout->offsets.size())
              throw emit_error(errc::unresolved_label, "line table entry target out of range");
            w.u2(static_cast<std::uint16_t>(layout->offsets[e.instruction]));
            w.u2(static_cast<std::uint16_t>(e.line));
          }
        } else if constexpr (std::is_same_v<T, StackMapTableAttr>) {
          if (layout == nullptr)
            throw emit_error(errc::unresolved_label, "stack map outside a Code attribute");
          write_stack_map(w, v, pool, *layout);
        } else if constexpr (std::is_same_v<T, FlagAttr>) {
          // zero-length marker
        } else if constexpr (std::is_same_v<T, OpaqueAttr>) {
          if (!opaque_attribute_relocatable(a.name))
            throw emit_error(errc::attribute_not_relocatable,
                             "attribute '" + a.name +
                                 "' is carried opaquely but contains pool indexes; refusing to emit");
          w.bytes(v.bytes);
        }
      },
      a.content);
  w.patch_u4(len_at, static_cast<std::uint32_t>(w.size() - body_start));
  (void)ctx;
}

}  // namespace detail

/// Writes one field_info structure against the given pool.
inline void write_field(ByteWriter& w, const FieldAst& f, const PoolLayout& pool) {
  w.u2(f.flags);
  w.u2(pool.index_of_utf8(f.name));
  w.u2(pool.index_of_utf8(f.type.descriptor()));
  detail::write_attribute_list(w, f.attributes, pool, AttrContext::Field);
}

/// Writes one method_info structure against the given pool.
inline void write_method(ByteWriter& w, const MethodAst& m, const PoolLayout& pool) {
  w.u2(m.flags);
  w.u2(pool.index_of_utf8(m.signature.name));
  w.u2(pool.index_of_utf8(m.signature.method_descriptor()));
  detail::write_attribute_list(w, m.attributes, pool, AttrContext::Method);
}

/// fjvm: AST to class-file bytes with a deterministically rebuilt pool.
/// A pure function of the AST: canonical-equal inputs produce identical
/// bytes.
inline Bytes emit_class(const ClassAst& a) {
  if (a.fields.size() > 65535) throw emit_error(errc::capacity_overflow, "too many fields");
  if (a.methods.size() > 65535) throw emit_error(errc::capacity_overflow, "too many methods");
  if (a.interfaces.size() > 65535) throw emit_error(errc::capacity_overflow, "too many interfaces");

  PoolLayout pool = build_pool(a);
  ByteWriter w;
  w.u4(kClassMagic);
  w.u2(a.minor_version());
  w.u2(a.major_version());
  pool.write(w);
  w.u2(a.flags);
  w.u2(pool.index_of_class(a.class_type));
  w.u2(a.superclass ? pool.index_of_class(*a.superclass) : 0);

  auto ifaces = detail::sorted_view(a.interfaces);
  w.u2(static_cast<std::uint16_t>(ifaces.size()));
  for (const auto* i : ifaces) w.u2(pool.index_of_class(*i));

  auto fields = detail::sorted_view(a.fields);
  w.u2(static_cast<std::uint16_t>(fields.size()));
  for (const auto* f : fields) write_field(w, *f, pool);

  auto methods = detail::sorted_view(a.methods);
  w.u2(static_cast<std::uint16_t>(methods.size()));
  for (const auto* m : methods) write_method(w, *m, pool);

  detail::write_attribute_list(w, a.attributes, pool, AttrContext::Class);
  return w.take();
}

}  // namespace aspa

#endif  // ASPA_CLASSFILE_WRITE_HPP
