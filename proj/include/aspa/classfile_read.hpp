#ifndef ASPA_CLASSFILE_READ_HPP
#define ASPA_CLASSFILE_READ_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/bytes.hpp"
#include "aspa/constant.hpp"
#include "aspa/error.hpp"
#include "aspa/instruction.hpp"
#include "aspa/java_type.hpp"

namespace aspa {

inline constexpr std::uint32_t kClassMagic = 0xCAFEBABE;
inline constexpr std::uint16_t kMinMajorVersion = 45;
inline constexpr std::uint16_t kMaxMajorVersion = 52;

/// A constant pool read from the wire with every index reference resolved to
/// a self-contained ConstantValue. Slot 0 and the phantom slot after each
/// long/double stay empty.
class ResolvedPool {
 public:
  explicit ResolvedPool(std::vector<std::optional<ConstantValue>> slots)
      : slots_(std::move(slots)) {}
  ResolvedPool() : slots_(1) {}

  const ConstantValue& at(std::uint16_t index, std::size_t err_offset) const {
    if (index == 0 || index >= slots_.size() || !slots_[index])
      throw parse_error(errc::bad_pool_reference, err_offset,
                        "constant pool index " + std::to_string(index) + " is not a valid entry");
    return *slots_[index];
  }

  const ConstantValue& at_tag(std::uint16_t index, ConstantValue::Tag tag,
                              std::size_t err_offset) const {
    const ConstantValue& c = at(index, err_offset);
    if (c.tag != tag)
      throw parse_error(errc::bad_pool_reference, err_offset,
                        "constant pool index " + std::to_string(index) +
                            " has the wrong tag for this reference");
    return c;
  }

  const std::string& utf8_at(std::uint16_t index, std::size_t err_offset) const {
    return at_tag(index, ConstantValue::Tag::Utf8, err_offset).text;
  }

  const std::string& class_name_at(std::uint16_t index, std::size_t err_offset) const {
    return at_tag(index, ConstantValue::Tag::Class, err_offset).text;
  }

  /// Every resolved entry, in slot order (includes entries nothing refers to).
  std::vector<ConstantValue> all() const {
    std::vector<ConstantValue> out;
    for (const auto& s : slots_)
      if (s) out.push_back(*s);
    return out;
  }

 private:
  std::vector<std::optional<ConstantValue>> slots_;
};

namespace detail {

struct RawPoolEntry {
  std::uint8_t tag = 0;
  std::uint16_t a = 0, b = 0;
  std::uint8_t kind = 0;
  std::uint64_t bits = 0;
  std::string text;
  std::size_t offset = 0;
};

inline int pool_resolve_rank(std::uint8_t tag) {
  using Tag = ConstantValue::Tag;
  switch (static_cast<Tag>(tag)) {
    case Tag::Utf8:
    case Tag::Integer:
    case Tag::Float:
    case Tag::Long:
    case Tag::Double:
      return 0;
    case Tag::Class:
    case Tag::String:
    case Tag::NameAndType:
    case Tag::MethodType:
      return 1;
    case Tag::FieldRef:
    case Tag::MethodRef:
    case Tag::InterfaceMethodRef:
      return 2;
    case Tag::MethodHandle:
    case Tag::InvokeDynamic:
      return 3;
  }
  return -1;
}

}  // namespace detail

/// Reads a JVM constant pool (count followed by entries) and resolves every
/// internal reference. The reference graph between tags is acyclic, so
/// resolution proceeds in a few rank passes.
inline ResolvedPool parse_pool(ByteReader& r) {
  using Tag = ConstantValue::Tag;
  std::uint16_t count = r.u2();
  std::vector<detail::RawPoolEntry> raw(count);  // index 0 unused
  std::vector<bool> present(count, false);
  for (std::uint16_t i = 1; i < count; ++i) {
    detail::RawPoolEntry& e = raw[i];
    e.offset = r.pos();
    e.tag = r.u1();
    present[i] = true;
    if (detail::pool_resolve_rank(e.tag) < 0)
      throw parse_error(errc::bad_pool_reference, e.offset,
                        "unknown constant pool tag " + std::to_string(e.tag));
    switch (static_cast<Tag>(e.tag)) {
      case Tag::Utf8: {
        std::uint16_t len = r.u2();
        e.text = r.str(len);
        break;
      }
      case Tag::Integer:
      case Tag::Float:
        e.bits = r.u4();
        break;
      case Tag::Long:
      case Tag::Double:
        e.bits = r.u8();
        ++i;  // phantom slot
        break;
      case Tag::Class:
      case Tag::String:
      case Tag::MethodType:
        e.a = r.u2();
        break;
      case Tag::NameAndType:
      case Tag::FieldRef:
      case Tag::MethodRef:
      case Tag::InterfaceMethodRef:
      case Tag::InvokeDynamic:
        e.a = r.u2();
        e.b = r.u2();
        break;
      case Tag::MethodHandle:
        e.kind = r.u1();
        e.a = r.u2();
        break;
    }
  }

  std::vector<std::optional<ConstantValue>> slots(count);
  auto resolved = [&](std::uint16_t idx, Tag want, std::size_t at) -> const ConstantValue& {
    if (idx == 0 || idx >= count || !slots[idx])
      throw parse_error(errc::bad_pool_reference, at,
                        "constant pool index " + std::to_string(idx) + " out of range or unresolved");
    if (slots[idx]->tag != want)
      throw parse_error(errc::bad_pool_reference, at,
                        "constant pool index " + std::to_string(idx) + " has unexpected tag");
    return *slots[idx];
  };

  for (int rank = 0; rank <= 3; ++rank) {
    for (std::uint16_t i = 1; i < count; ++i) {
      if (!present[i] || detail::pool_resolve_rank(raw[i].tag) != rank) continue;
      const detail::RawPoolEntry& e = raw[i];
      switch (static_cast<Tag>(e.tag)) {
        case Tag::Utf8:
          slots[i] = ConstantValue::utf8(e.text);
          break;
        case Tag::Integer:
          slots[i] = ConstantValue::integer(static_cast<std::int32_t>(e.bits));
          break;
        case Tag::Float:
          slots[i] = ConstantValue::float_bits(static_cast<std::uint32_t>(e.bits));
          break;
        case Tag::Long:
          slots[i] = ConstantValue::long_value(static_cast<std::int64_t>(e.bits));
          break;
        case Tag::Double:
          slots[i] = ConstantValue::double_bits(e.bits);
          break;
        case Tag::Class:
          slots[i] = ConstantValue::class_ref(resolved(e.a, Tag::Utf8, e.offset).text);
          break;
        case Tag::String:
          slots[i] = ConstantValue::string_ref(resolved(e.a, Tag::Utf8, e.offset).text);
          break;
        case Tag::MethodType:
          slots[i] = ConstantValue::method_type(resolved(e.a, Tag::Utf8, e.offset).text);
          break;
        case Tag::NameAndType:
          slots[i] = ConstantValue::name_and_type(resolved(e.a, Tag::Utf8, e.offset).text,
                                                  resolved(e.b, Tag::Utf8, e.offset).text);
          break;
        case Tag::FieldRef:
        case Tag::MethodRef:
        case Tag::InterfaceMethodRef: {
          const ConstantValue& cls = resolved(e.a, Tag::Class, e.offset);
          const ConstantValue& nat = resolved(e.b, Tag::NameAndType, e.offset);
          slots[i] = ConstantValue::member_ref(static_cast<Tag>(e.tag), cls.text, nat.member_name,
                                               nat.descriptor);
          break;
        }
        case Tag::MethodHandle: {
          if (e.a == 0 || e.a >= count || !slots[e.a])
            throw parse_error(errc::bad_pool_reference, e.offset, "method handle target unresolved");
          const ConstantValue& target = *slots[e.a];
          if (target.tag != Tag::FieldRef && target.tag != Tag::MethodRef &&
              target.tag != Tag::InterfaceMethodRef)
            throw parse_error(errc::bad_pool_reference, e.offset,
                              "method handle target is not a member reference");
          slots[i] = ConstantValue::method_handle(e.kind, target.tag, target.owner,
                                                  target.member_name, target.descriptor);
          break;
        }
        case Tag::InvokeDynamic: {
          const ConstantValue& nat = resolved(e.b, Tag::NameAndType, e.offset);
          slots[i] = ConstantValue::invoke_dynamic(e.a, nat.member_name, nat.descriptor);
          break;
        }
      }
    }
  }
  return ResolvedPool(std::move(slots));
}

namespace detail {

/// Maps byte offsets within a code array to instruction indices.
struct CodeLocator {
  std::vector<std::uint32_t> offsets;  // offsets[i] = byte offset of instruction i
  std::uint32_t code_length = 0;

  std::uint32_t index_at(std::uint32_t offset, std::size_t err_at, errc kind) const {
    auto it = std::lower_bound(offsets.begin(), offsets.end(), offset);
    if (it == offsets.end() || *it != offset)
      throw parse_error(kind, err_at,
                        "byte offset " + std::to_string(offset) + " is not an instruction boundary");
    return static_cast<std::uint32_t>(it - offsets.begin());
  }

  /// Exception-table end offsets are exclusive and may equal code_length.
  std::uint32_t end_index_at(std::uint32_t offset, std::size_t err_at) const {
    if (offset == code_length) return static_cast<std::uint32_t>(offsets.size());
    return index_at(offset, err_at, errc::bad_branch_target);
  }
};

inline MemberRef to_member_ref(const ConstantValue& c) {
  return MemberRef{c.owner, c.member_name, c.descriptor};
}

}  // namespace detail

std::vector<AttributeAst> parse_attributes(ByteReader& r, const ResolvedPool& pool, AttrContext ctx,
                                           const detail::CodeLocator* code);

/// Decodes a full Code attribute body (stack sizes, bytecode, exception
/// table, nested attributes). Branch and table offsets come out as
/// instruction indices; wide prefixes and the *_w opcode forms are folded
/// into their logical instructions.
inline CodeAst decode_code(ByteReader& r, const ResolvedPool& pool) {
  using Tag = ConstantValue::Tag;
  CodeAst code;
  code.max_stack = r.u2();
  code.max_locals = r.u2();
  std::uint32_t code_len = r.u4();
  if (code_len == 0)
    throw parse_error(errc::truncated_code, r.pos(), "code array is empty");
  std::size_t code_start = r.pos();
  std::size_t code_end = code_start + code_len;
  if (code_len > r.remaining())
    throw parse_error(errc::truncated_code, r.size(), "code array extends past the input");

  detail::CodeLocator locator;
  locator.code_length = code_len;
  // Targets are byte offsets until the whole array has been scanned.
  std::vector<Instruction> raw;
  while (r.pos() < code_end) {
    std::uint32_t at = static_cast<std::uint32_t>(r.pos() - code_start);
    locator.offsets.push_back(at);
    std::uint8_t op_byte = r.u1();
    Opcode op = static_cast<Opcode>(op_byte);
    const OpcodeInfo* info = opcode_info(op_byte);
    if (info == nullptr)
      throw parse_error(errc::unknown_opcode, r.pos() - 1,
                        "unknown opcode 0x" + std::to_string(op_byte));
    Instruction in;
    in.op = op;
    switch (info->operand) {
      case OperandKind::None:
        break;
      case OperandKind::Imm8:
        in.operand = Imm{r.s1()};
        break;
      case OperandKind::Imm16:
        in.operand = Imm{r.s2()};
        break;
      case OperandKind::Local:
        in.operand = LocalVar{r.u1()};
        break;
      case OperandKind::LocalInc:
        in.operand = IincArgs{r.u1(), r.s1()};
        break;
      case OperandKind::Const: {
        std::uint16_t idx = op == Opcode::ldc ? r.u1() : r.u2();
        const ConstantValue& c = pool.at(idx, r.pos());
        if (op == Opcode::ldc2_w) {
          if (!c.is_wide())
            throw parse_error(errc::bad_pool_reference, r.pos(), "ldc2_w must load long or double");
        } else if (c.is_wide() || c.tag == Tag::Utf8 || c.tag == Tag::NameAndType ||
                   c.tag == Tag::FieldRef || c.tag == Tag::MethodRef ||
                   c.tag == Tag::InterfaceMethodRef || c.tag == Tag::InvokeDynamic) {
          throw parse_error(errc::bad_pool_reference, r.pos(), "constant not loadable by ldc");
        }
        in.operand = c;
        break;
      }
      case OperandKind::FieldRef:
        in.operand = detail::to_member_ref(pool.at_tag(r.u2(), Tag::FieldRef, r.pos()));
        break;
      case OperandKind::MethodRef:
        in.operand = detail::to_member_ref(pool.at_tag(r.u2(), Tag::MethodRef, r.pos()));
        break;
      case OperandKind::InterfaceRef: {
        in.operand = detail::to_member_ref(pool.at_tag(r.u2(), Tag::InterfaceMethodRef, r.pos()));
        r.u1();  // arg-slot count, recomputed at emit time
        r.u1();
        break;
      }
      case OperandKind::DynamicRef:
        in.operand = pool.at_tag(r.u2(), Tag::InvokeDynamic, r.pos());
        r.u1();
        r.u1();
        break;
      case OperandKind::Type:
        in.operand = TypeRef{pool.class_name_at(r.u2(), r.pos())};
        break;
      case OperandKind::NewArrayType:
        in.operand = NewArrayType{r.u1()};
        break;
      case OperandKind::MultiArray: {
        std::string name = pool.class_name_at(r.u2(), r.pos());
        in.operand = MultiArrayArgs{std::move(name), r.u1()};
        break;
      }
      case OperandKind::Branch: {
        std::int32_t rel = r.s2();
        in.operand = BranchTarget{static_cast<std::uint32_t>(at + rel)};
        break;
      }
      case OperandKind::Switch: {
        while ((r.pos() - code_start) % 4 != 0) r.u1();  // alignment padding, content ignored
        std::int32_t def = r.s4();
        SwitchTable table;
        table.default_target = static_cast<std::uint32_t>(at + def);
        if (op == Opcode::tableswitch) {
          std::int32_t low = r.s4();
          std::int32_t high = r.s4();
          if (low > high)
            throw parse_error(errc::truncated_code, r.pos(), "tableswitch low exceeds high");
          std::int64_t n = static_cast<std::int64_t>(high) - low + 1;
          if (n > static_cast<std::int64_t>((code_end - r.pos()) / 4) + 1)
            throw parse_error(errc::truncated_code, r.pos(), "tableswitch overruns the code array");
          for (std::int64_t k = 0; k < n; ++k)
            table.cases.emplace_back(static_cast<std::int32_t>(low + k),
                                     static_cast<std::uint32_t>(at + r.s4()));
        } else {
          std::int32_t npairs = r.s4();
          if (npairs < 0 || static_cast<std::uint32_t>(npairs) > (code_end - r.pos()) / 8 + 1)
            throw parse_error(errc::truncated_code, r.pos(), "lookupswitch overruns the code array");
          for (std::int32_t k = 0; k < npairs; ++k) {
            std::int32_t key = r.s4();
            table.cases.emplace_back(key, static_cast<std::uint32_t>(at + r.s4()));
          }
        }
        in.operand = std::move(table);
        break;
      }
      case OperandKind::Internal: {
        if (op == Opcode::wide) {
          std::uint8_t sub = r.u1();
          Opcode sub_op = static_cast<Opcode>(sub);
          if (sub_op == Opcode::iinc) {
            in.op = Opcode::iinc;
            in.operand = IincArgs{r.u2(), r.s2()};
          } else if (operand_kind(sub_op) == OperandKind::Local) {
            in.op = sub_op;
            in.operand = LocalVar{r.u2()};
          } else {
            throw parse_error(errc::unknown_opcode, r.pos() - 1, "invalid opcode after wide prefix");
          }
        } else if (op == Opcode::ldc_w) {
          const ConstantValue& c = pool.at(r.u2(), r.pos());
          if (c.is_wide())
            throw parse_error(errc::bad_pool_reference, r.pos(), "ldc_w cannot load long or double");
          in.op = Opcode::ldc;
          in.operand = c;
        } else if (op == Opcode::goto_w || op == Opcode::jsr_w) {
          std::int32_t rel = r.s4();
          in.op = op == Opcode::goto_w ? Opcode::goto_ : Opcode::jsr;
          in.operand = BranchTarget{static_cast<std::uint32_t>(at + rel)};
        } else {
          throw parse_error(errc::unknown_opcode, r.pos() - 1,
                            "reserved opcode 0x" + std::to_string(op_byte));
        }
        break;
      }
    }
    if (r.pos() > code_end)
      throw parse_error(errc::truncated_code, code_end, "instruction overruns the code array");
    raw.push_back(std::move(in));
  }

  // Second pass: byte offsets -> instruction indices.
  for (auto& in : raw) {
    if (auto* b = std::get_if<BranchTarget>(&in.operand)) {
      b->index = locator.index_at(b->index, code_start, errc::bad_branch_target);
    } else if (auto* sw = std::get_if<SwitchTable>(&in.operand)) {
      sw->default_target = locator.index_at(sw->default_target, code_start, errc::bad_branch_target);
      for (auto& [key, target] : sw->cases)
        target = locator.index_at(target, code_start, errc::bad_branch_target);
    }
  }
  code.instructions = std::move(raw);

  std::uint16_t handler_count = r.u2();
  for (std::uint16_t i = 0; i < handler_count; ++i) {
    std::size_t at = r.pos();
    ExceptionHandler h;
    h.start = locator.index_at(r.u2(), at, errc::bad_branch_target);
    h.end = locator.end_index_at(r.u2(), at);
    h.handler = locator.index_at(r.u2(), at, errc::bad_branch_target);
    std::uint16_t catch_idx = r.u2();
    if (catch_idx != 0) h.catch_type = pool.class_name_at(catch_idx, at);
    code.handlers.push_back(std::move(h));
  }
  code.attributes = parse_attributes(r, pool, AttrContext::Code, &locator);
  return code;
}

inline CodeAst decode_code(std::span<const std::uint8_t> body, const ResolvedPool& pool) {
  ByteReader r(body);
  CodeAst code = decode_code(r, pool);
  if (!r.at_end())
    throw parse_error(errc::malformed_attribute, r.pos(), "trailing bytes after Code attribute body");
  return code;
}

namespace detail {

inline VerificationType parse_verification_type(ByteReader& r, const ResolvedPool& pool,
                                                const CodeLocator& locator) {
  VerificationType vt;
  std::uint8_t tag = r.u1();
  if (tag > 8)
    throw parse_error(errc::malformed_attribute, r.pos() - 1, "unknown verification type tag");
  vt.kind = static_cast<VerificationType::Kind>(tag);
  if (vt.kind == VerificationType::Kind::Object) {
    vt.class_name = pool.class_name_at(r.u2(), r.pos());
  } else if (vt.kind == VerificationType::Kind::Uninitialized) {
    vt.new_instruction = locator.index_at(r.u2(), r.pos(), errc::malformed_attribute);
  }
  return vt;
}

inline StackMapTableAttr parse_stack_map(ByteReader& r, const ResolvedPool& pool,
                                         const CodeLocator& locator) {
  StackMapTableAttr smt;
  std::uint16_t n = r.u2();
  std::int64_t offset = -1;
  for (std::uint16_t i = 0; i < n; ++i) {
    std::size_t at = r.pos();
    std::uint8_t type = r.u1();
    StackMapFrame frame;
    std::uint32_t delta = 0;
    if (type <= 63) {
      frame.kind = StackMapFrame::Kind::Same;
      delta = type;
    } else if (type <= 127) {
      frame.kind = StackMapFrame::Kind::SameLocals1;
      delta = type - 64;
      frame.stack.push_back(parse_verification_type(r, pool, locator));
    } else if (type == 247) {
      frame.kind = StackMapFrame::Kind::SameLocals1;
      delta = r.u2();
      frame.stack.push_back(parse_verification_type(r, pool, locator));
    } else if (type >= 248 && type <= 250) {
      frame.kind = StackMapFrame::Kind::Chop;
      frame.chop_count = static_cast<std::uint8_t>(251 - type);
      delta = r.u2();
    } else if (type == 251) {
      frame.kind = StackMapFrame::Kind::Same;
      delta = r.u2();
    } else if (type >= 252 && type <= 254) {
      frame.kind = StackMapFrame::Kind::Append;
      delta = r.u2();
      for (int k = 0; k < type - 251; ++k)
        frame.locals.push_back(parse_verification_type(r, pool, locator));
    } else if (type == 255) {
      frame.kind = StackMapFrame::Kind::Full;
      delta = r.u2();
      std::uint16_t nlocals = r.u2();
      for (std::uint16_t k = 0; k < nlocals; ++k)
        frame.locals.push_back(parse_verification_type(r, pool, locator));
      std::uint16_t nstack = r.u2();
      for (std::uint16_t k = 0; k < nstack; ++k)
        frame.stack.push_back(parse_verification_type(r, pool, locator));
    } else {
      throw parse_error(errc::malformed_attribute, at, "reserved stack map frame type");
    }
    offset = offset < 0 ? delta : offset + delta + 1;
    frame.at_instruction = locator.index_at(static_cast<std::uint32_t>(offset), at,
                                            errc::malformed_attribute);
    smt.frames.push_back(std::move(frame));
  }
  return smt;
}

}  // namespace detail

/// Parses an attribute list (count followed by entries). Known attributes in
/// their defining context come back structured; everything else is carried
/// as opaque bytes.
inline std::vector<AttributeAst> parse_attributes(ByteReader& r, const ResolvedPool& pool,
                                                  AttrContext ctx,
                                                  const detail::CodeLocator* code = nullptr) {
  std::uint16_t count = r.u2();
  std::vector<AttributeAst> out;
  out.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    AttributeAst attr;
    attr.name = pool.utf8_at(r.u2(), r.pos());
    std::uint32_t len = r.u4();
    std::size_t body_start = r.pos();
    std::size_t body_end = body_start + len;
    if (len > r.remaining())
      throw parse_error(errc::truncated_input, r.size(), "attribute body extends past the input");
    switch (attribute_kind(attr.name, ctx)) {
      case AttrKind::Code:
        attr.content = decode_code(r, pool);
        break;
      case AttrKind::Exceptions: {
        ExceptionsAttr exc;
        std::uint16_t n = r.u2();
        for (std::uint16_t k = 0; k < n; ++k) exc.types.push_back(pool.class_name_at(r.u2(), r.pos()));
        attr.content = std::move(exc);
        break;
      }
      case AttrKind::ConstVal: {
        const ConstantValue& c = pool.at(r.u2(), r.pos());
        using Tag = ConstantValue::Tag;
        if (c.tag != Tag::Integer && c.tag != Tag::Float && c.tag != Tag::Long &&
            c.tag != Tag::Double && c.tag != Tag::String)
          throw parse_error(errc::bad_pool_reference, r.pos(),
                            "ConstantValue attribute must reference a primitive or string constant");
        attr.content = ConstantValueAttr{c};
        break;
      }
      case AttrKind::SourceFile:
        attr.content = SourceFileAttr{pool.utf8_at(r.u2(), r.pos())};
        break;
      case AttrKind::Signature:
        attr.content = SignatureAttr{pool.utf8_at(r.u2(), r.pos())};
        break;
      case AttrKind::InnerClasses: {
        InnerClassesAttr ic;
        std::uint16_t n = r.u2();
        for (std::uint16_t k = 0; k < n; ++k) {
          InnerClassRow row;
          std::uint16_t inner = r.u2(), outer = r.u2(), name = r.u2();
          row.flags = r.u2();
          if (inner) row.inner = pool.class_name_at(inner, r.pos());
          if (outer) row.outer = pool.class_name_at(outer, r.pos());
          if (name) row.inner_name = pool.utf8_at(name, r.pos());
          ic.rows.push_back(std::move(row));
        }
        attr.content = std::move(ic);
        break;
      }
      case AttrKind::LineNumberTable: {
        LineNumberTableAttr lnt;
        std::uint16_t n = r.u2();
        for (std::uint16_t k = 0; k < n; ++k) {
          std::size_t at = r.pos();
          std::uint32_t pc = r.u2();
          std::uint16_t line = r.u2();
          lnt.lines.push_back(LineEntry{code->index_at(pc, at, errc::malformed_attribute), line});
        }
        attr.content = std::move(lnt);
        break;
      }
      case AttrKind::StackMapTable:
        attr.content = detail::parse_stack_map(r, pool, *code);
        break;
      case AttrKind::Flag:
        attr.content = FlagAttr{};
        break;
      case AttrKind::Opaque: {
        auto body = r.bytes(len);
        attr.content = OpaqueAttr{Bytes(body.begin(), body.end())};
        break;
      }
    }
    if (r.pos() != body_end)
      throw parse_error(errc::malformed_attribute, r.pos(),
                        "attribute '" + attr.name + "' body length does not match its content");
    out.push_back(std::move(attr));
  }
  return out;
}

/// Reads one field_info structure.
inline FieldAst parse_field(ByteReader& r, const ResolvedPool& pool) {
  FieldAst f;
  f.flags = r.u2();
  f.name = pool.utf8_at(r.u2(), r.pos());
  std::size_t at = r.pos();
  f.type = parse_field_descriptor(pool.utf8_at(r.u2(), at), at);
  f.attributes = parse_attributes(r, pool, AttrContext::Field);
  return f;
}

/// Reads one method_info structure.
inline MethodAst parse_method(ByteReader& r, const ResolvedPool& pool) {
  MethodAst m;
  m.flags = r.u2();
  std::string name = pool.utf8_at(r.u2(), r.pos());
  std::size_t at = r.pos();
  m.signature = Signature::from_descriptor(std::move(name), pool.utf8_at(r.u2(), at), at);
  m.attributes = parse_attributes(r, pool, AttrContext::Method);
  return m;
}

/// fAST: class-file bytes to a canonical, pool-index-free AST.
inline ClassAst parse_class(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  if (r.remaining() < 4 || r.u4() != kClassMagic)
    throw parse_error(errc::malformed_magic, 0, "missing 0xCAFEBABE magic");
  std::uint16_t minor = r.u2();
  std::uint16_t major = r.u2();
  if (major < kMinMajorVersion || major > kMaxMajorVersion)
    throw parse_error(errc::unsupported_version, 6,
                      "class file major version " + std::to_string(major) +
                          " outside supported range " + std::to_string(kMinMajorVersion) + ".." +
                          std::to_string(kMaxMajorVersion));

  ResolvedPool pool = parse_pool(r);

  ClassAst out;
  out.version = static_cast<std::uint32_t>(major) << 16 | minor;
  out.flags = r.u2();
  out.class_type = pool.class_name_at(r.u2(), r.pos());
  std::uint16_t super_idx = r.u2();
  if (super_idx != 0) out.superclass = pool.class_name_at(super_idx, r.pos());

  std::uint16_t iface_count = r.u2();
  for (std::uint16_t i = 0; i < iface_count; ++i)
    out.interfaces.push_back(pool.class_name_at(r.u2(), r.pos()));

  std::uint16_t field_count = r.u2();
  for (std::uint16_t i = 0; i < field_count; ++i) out.fields.push_back(parse_field(r, pool));

  std::uint16_t method_count = r.u2();
  for (std::uint16_t i = 0; i < method_count; ++i) out.methods.push_back(parse_method(r, pool));

  out.attributes = parse_attributes(r, pool, AttrContext::Class);
  if (!r.at_end())
    throw parse_error(errc::truncated_input, r.pos(), "trailing bytes after class structure");

  out.constants = pool.all();
  sort_sets(out);
  return out;
}

inline ClassAst parse_class(const Bytes& data) {
  return parse_class(std::span<const std::uint8_t>(data.data(), data.size()));
}

}  // namespace aspa

#endif  // ASPA_CLASSFILE_READ_HPP
