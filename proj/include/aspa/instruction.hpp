#ifndef ASPA_INSTRUCTION_HPP
#define ASPA_INSTRUCTION_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aspa/constant.hpp"

namespace aspa {

/// JVM opcodes, numbered as in the class-file format. `ldc_w`, `goto_w`,
/// `jsr_w` and the `wide` prefix never appear in decoded instructions: the
/// decoder folds them into their logical base opcode and the encoder picks
/// the narrow or wide encoding that fits.
enum class Opcode : std::uint8_t {
  nop = 0x00,
  aconst_null = 0x01,
  iconst_m1 = 0x02,
  iconst_0 = 0x03,
  iconst_1 = 0x04,
  iconst_2 = 0x05,
  iconst_3 = 0x06,
  iconst_4 = 0x07,
  iconst_5 = 0x08,
  lconst_0 = 0x09,
  lconst_1 = 0x0a,
  fconst_0 = 0x0b,
  fconst_1 = 0x0c,
  fconst_2 = 0x0d,
  dconst_0 = 0x0e,
  dconst_1 = 0x0f,
  bipush = 0x10,
  sipush = 0x11,
  ldc = 0x12,
  ldc_w = 0x13,
  ldc2_w = 0x14,
  iload = 0x15,
  lload = 0x16,
  fload = 0x17,
  dload = 0x18,
  aload = 0x19,
  iload_0 = 0x1a,
  iload_1 = 0x1b,
  iload_2 = 0x1c,
  iload_3 = 0x1d,
  lload_0 = 0x1e,
  lload_1 = 0x1f,
  lload_2 = 0x20,
  lload_3 = 0x21,
  fload_0 = 0x22,
  fload_1 = 0x23,
  fload_2 = 0x24,
  fload_3 = 0x25,
  dload_0 = 0x26,
  dload_1 = 0x27,
  dload_2 = 0x28,
  dload_3 = 0x29,
  aload_0 = 0x2a,
  aload_1 = 0x2b,
  aload_2 = 0x2c,
  aload_3 = 0x2d,
  iaload = 0x2e,
  laload = 0x2f,
  faload = 0x30,
  daload = 0x31,
  aaload = 0x32,
  baload = 0x33,
  caload = 0x34,
  saload = 0x35,
  istore = 0x36,
  lstore = 0x37,
  fstore = 0x38,
  dstore = 0x39,
  astore = 0x3a,
  istore_0 = 0x3b,
  istore_1 = 0x3c,
  istore_2 = 0x3d,
  istore_3 = 0x3e,
  lstore_0 = 0x3f,
  lstore_1 = 0x40,
  lstore_2 = 0x41,
  lstore_3 = 0x42,
  fstore_0 = 0x43,
  fstore_1 = 0x44,
  fstore_2 = 0x45,
  fstore_3 = 0x46,
  dstore_0 = 0x47,
  dstore_1 = 0x48,
  dstore_2 = 0x49,
  dstore_3 = 0x4a,
  astore_0 = 0x4b,
  astore_1 = 0x4c,
  astore_2 = 0x4d,
  astore_3 = 0x4e,
  iastore = 0x4f,
  lastore = 0x50,
  fastore = 0x51,
  dastore = 0x52,
  aastore = 0x53,
  bastore = 0x54,
  castore = 0x55,
  sastore = 0x56,
  pop = 0x57,
  pop2 = 0x58,
  dup = 0x59,
  dup_x1 = 0x5a,
  dup_x2 = 0x5b,
  dup2 = 0x5c,
  dup2_x1 = 0x5d,
  dup2_x2 = 0x5e,
  swap = 0x5f,
  iadd = 0x60,
  ladd = 0x61,
  fadd = 0x62,
  dadd = 0x63,
  isub = 0x64,
  lsub = 0x65,
  fsub = 0x66,
  dsub = 0x67,
  imul = 0x68,
  lmul = 0x69,
  fmul = 0x6a,
  dmul = 0x6b,
  idiv = 0x6c,
  ldiv_ = 0x6d,
  fdiv = 0x6e,
  ddiv = 0x6f,
  irem = 0x70,
  lrem = 0x71,
  frem = 0x72,
  drem = 0x73,
  ineg = 0x74,
  lneg = 0x75,
  fneg = 0x76,
  dneg = 0x77,
  ishl = 0x78,
  lshl = 0x79,
  ishr = 0x7a,
  lshr = 0x7b,
  iushr = 0x7c,
  lushr = 0x7d,
  iand = 0x7e,
  land = 0x7f,
  ior = 0x80,
  lor = 0x81,
  ixor = 0x82,
  lxor = 0x83,
  iinc = 0x84,
  i2l = 0x85,
  i2f = 0x86,
  i2d = 0x87,
  l2i = 0x88,
  l2f = 0x89,
  l2d = 0x8a,
  f2i = 0x8b,
  f2l = 0x8c,
  f2d = 0x8d,
  d2i = 0x8e,
  d2l = 0x8f,
  d2f = 0x90,
  i2b = 0x91,
  i2c = 0x92,
  i2s = 0x93,
  lcmp = 0x94,
  fcmpl = 0x95,
  fcmpg = 0x96,
  dcmpl = 0x97,
  dcmpg = 0x98,
  ifeq = 0x99,
  ifne = 0x9a,
  iflt = 0x9b,
  ifge = 0x9c,
  ifgt = 0x9d,
  ifle = 0x9e,
  if_icmpeq = 0x9f,
  if_icmpne = 0xa0,
  if_icmplt = 0xa1,
  if_icmpge = 0xa2,
  if_icmpgt = 0xa3,
  if_icmple = 0xa4,
  if_acmpeq = 0xa5,
  if_acmpne = 0xa6,
  goto_ = 0xa7,
  jsr = 0xa8,
  ret = 0xa9,
  tableswitch = 0xaa,
  lookupswitch = 0xab,
  ireturn = 0xac,
  lreturn = 0xad,
  freturn = 0xae,
  dreturn = 0xaf,
  areturn = 0xb0,
  return_ = 0xb1,
  getstatic = 0xb2,
  putstatic = 0xb3,
  getfield = 0xb4,
  putfield = 0xb5,
  invokevirtual = 0xb6,
  invokespecial = 0xb7,
  invokestatic = 0xb8,
  invokeinterface = 0xb9,
  invokedynamic = 0xba,
  new_ = 0xbb,
  newarray = 0xbc,
  anewarray = 0xbd,
  arraylength = 0xbe,
  athrow = 0xbf,
  checkcast = 0xc0,
  instanceof_ = 0xc1,
  monitorenter = 0xc2,
  monitorexit = 0xc3,
  wide = 0xc4,
  multianewarray = 0xc5,
  ifnull = 0xc6,
  ifnonnull = 0xc7,
  goto_w = 0xc8,
  jsr_w = 0xc9,
};

/// The operand shape an opcode mandates.
enum class OperandKind : std::uint8_t {
  None,
  Imm8,          // bipush
  Imm16,         // sipush
  Local,         // iload..astore, ret (u1, u2 under wide)
  LocalInc,      // iinc
  Const,         // ldc (narrow/wide picked at emit), ldc2_w
  FieldRef,      // getstatic..putfield
  MethodRef,     // invokevirtual/special/static
  InterfaceRef,  // invokeinterface (count byte recomputed at emit)
  DynamicRef,    // invokedynamic
  Type,          // new/anewarray/checkcast/instanceof
  NewArrayType,  // newarray primitive code
  MultiArray,    // multianewarray
  Branch,        // s2 branches; goto/jsr widen when needed
  Switch,        // tableswitch/lookupswitch
  Internal,      // wide prefix and *_w forms: never present in decoded output
};

struct OpcodeInfo {
  const char* mnemonic;
  OperandKind operand;
};

inline const OpcodeInfo* opcode_info(std::uint8_t op) {
  static const std::array<OpcodeInfo, 202> table = [] {
    std::array<OpcodeInfo, 202> t{};
    auto set = [&t](Opcode o, const char* name, OperandKind k) {
      t[static_cast<std::uint8_t>(o)] = OpcodeInfo{name, k};
    };
    const char* plain[] = {
        "nop", "aconst_null", "iconst_m1", "iconst_0", "iconst_1", "iconst_2", "iconst_3",
        "iconst_4", "iconst_5", "lconst_0", "lconst_1", "fconst_0", "fconst_1", "fconst_2",
        "dconst_0", "dconst_1"};
    for (std::uint8_t i = 0; i < 16; ++i) t[i] = OpcodeInfo{plain[i], OperandKind::None};
    set(Opcode::bipush, "bipush", OperandKind::Imm8);
    set(Opcode::sipush, "sipush", OperandKind::Imm16);
    set(Opcode::ldc, "ldc", OperandKind::Const);
    set(Opcode::ldc_w, "ldc_w", OperandKind::Internal);
    set(Opcode::ldc2_w, "ldc2_w", OperandKind::Const);
    const char* loads[] = {"iload", "lload", "fload", "dload", "aload"};
    for (int i = 0; i < 5; ++i)
      t[0x15 + i] = OpcodeInfo{loads[i], OperandKind::Local};
    const char* load_n[] = {"iload_0", "iload_1", "iload_2", "iload_3", "lload_0", "lload_1",
                            "lload_2", "lload_3", "fload_0", "fload_1", "fload_2", "fload_3",
                            "dload_0", "dload_1", "dload_2", "dload_3", "aload_0", "aload_1",
                            "aload_2", "aload_3"};
    for (int i = 0; i < 20; ++i) t[0x1a + i] = OpcodeInfo{load_n[i], OperandKind::None};
    const char* aloads[] = {"iaload", "laload", "faload", "daload", "aaload", "baload", "caload",
                            "saload"};
    for (int i = 0; i < 8; ++i) t[0x2e + i] = OpcodeInfo{aloads[i], OperandKind::None};
    const char* stores[] = {"istore", "lstore", "fstore", "dstore", "astore"};
    for (int i = 0; i < 5; ++i)
      t[0x36 + i] = OpcodeInfo{stores[i], OperandKind::Local};
    const char* store_n[] = {"istore_0", "istore_1", "istore_2", "istore_3", "lstore_0",
                             "lstore_1", "lstore_2", "lstore_3", "fstore_0", "fstore_1",
                             "fstore_2", "fstore_3", "dstore_0", "dstore_1", "dstore_2",
                             "dstore_3", "astore_0", "astore_1", "astore_2", "astore_3"};
    for (int i = 0; i < 20; ++i) t[0x3b + i] = OpcodeInfo{store_n[i], OperandKind::None};
    const char* astores[] = {"iastore", "lastore", "fastore", "dastore", "aastore", "bastore",
                             "castore", "sastore"};
    for (int i = 0; i < 8; ++i) t[0x4f + i] = OpcodeInfo{astores[i], OperandKind::None};
    const char* stack[] = {"pop", "pop2", "dup", "dup_x1", "dup_x2", "dup2", "dup2_x1",
                           "dup2_x2", "swap"};
    for (int i = 0; i < 9; ++i) t[0x57 + i] = OpcodeInfo{stack[i], OperandKind::None};
    const char* arith[] = {"iadd", "ladd", "fadd", "dadd", "isub", "lsub", "fsub", "dsub",
                           "imul", "lmul", "fmul", "dmul", "idiv", "ldiv", "fdiv", "ddiv",
                           "irem", "lrem", "frem", "drem", "ineg", "lneg", "fneg", "dneg",
                           "ishl", "lshl", "ishr", "lshr", "iushr", "lushr", "iand", "land",
                           "ior", "lor", "ixor", "lxor"};
    for (int i = 0; i < 36; ++i) t[0x60 + i] = OpcodeInfo{arith[i], OperandKind::None};
    set(Opcode::iinc, "iinc", OperandKind::LocalInc);
    const char* conv[] = {"i2l", "i2f", "i2d", "l2i", "l2f", "l2d", "f2i", "f2l", "f2d",
                          "d2i", "d2l", "d2f", "i2b", "i2c", "i2s"};
    for (int i = 0; i < 15; ++i) t[0x85 + i] = OpcodeInfo{conv[i], OperandKind::None};
    const char* cmp[] = {"lcmp", "fcmpl", "fcmpg", "dcmpl", "dcmpg"};
    for (int i = 0; i < 5; ++i) t[0x94 + i] = OpcodeInfo{cmp[i], OperandKind::None};
    const char* branches[] = {"ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle", "if_icmpeq",
                              "if_icmpne", "if_icmplt", "if_icmpge", "if_icmpgt", "if_icmple",
                              "if_acmpeq", "if_acmpne", "goto", "jsr"};
    for (int i = 0; i < 16; ++i) t[0x99 + i] = OpcodeInfo{branches[i], OperandKind::Branch};
    set(Opcode::ret, "ret", OperandKind::Local);
    set(Opcode::tableswitch, "tableswitch", OperandKind::Switch);
    set(Opcode::lookupswitch, "lookupswitch", OperandKind::Switch);
    const char* rets[] = {"ireturn", "lreturn", "freturn", "dreturn", "areturn", "return"};
    for (int i = 0; i < 6; ++i) t[0xac + i] = OpcodeInfo{rets[i], OperandKind::None};
    set(Opcode::getstatic, "getstatic", OperandKind::FieldRef);
    set(Opcode::putstatic, "putstatic", OperandKind::FieldRef);
    set(Opcode::getfield, "getfield", OperandKind::FieldRef);
    set(Opcode::putfield, "putfield", OperandKind::FieldRef);
    set(Opcode::invokevirtual, "invokevirtual", OperandKind::MethodRef);
    set(Opcode::invokespecial, "invokespecial", OperandKind::MethodRef);
    set(Opcode::invokestatic, "invokestatic", OperandKind::MethodRef);
    set(Opcode::invokeinterface, "invokeinterface", OperandKind::InterfaceRef);
    set(Opcode::invokedynamic, "invokedynamic", OperandKind::DynamicRef);
    set(Opcode::new_, "new", OperandKind::Type);
    set(Opcode::newarray, "newarray", OperandKind::NewArrayType);
    set(Opcode::anewarray, "anewarray", OperandKind::Type);
    set(Opcode::arraylength, "arraylength", OperandKind::None);
    set(Opcode::athrow, "athrow", OperandKind::None);
    set(Opcode::checkcast, "checkcast", OperandKind::Type);
    set(Opcode::instanceof_, "instanceof", OperandKind::Type);
    set(Opcode::monitorenter, "monitorenter", OperandKind::None);
    set(Opcode::monitorexit, "monitorexit", OperandKind::None);
    set(Opcode::wide, "wide", OperandKind::Internal);
    set(Opcode::multianewarray, "multianewarray", OperandKind::MultiArray);
    set(Opcode::ifnull, "ifnull", OperandKind::Branch);
    set(Opcode::ifnonnull, "ifnonnull", OperandKind::Branch);
    set(Opcode::goto_w, "goto_w", OperandKind::Internal);
    set(Opcode::jsr_w, "jsr_w", OperandKind::Internal);
    return t;
  }();
  if (op >= table.size() || table[op].mnemonic == nullptr) return nullptr;
  return &table[op];
}

inline const char* mnemonic(Opcode op) {
  const OpcodeInfo* info = opcode_info(static_cast<std::uint8_t>(op));
  return info ? info->mnemonic : "?";
}

// Operand payloads. Branch targets, switch targets and `Uninitialized`
// verification offsets are instruction indices, never byte offsets.

struct Imm {
  std::int32_t value = 0;
  bool operator==(const Imm&) const = default;
};

struct LocalVar {
  std::uint16_t index = 0;
  bool operator==(const LocalVar&) const = default;
};

struct IincArgs {
  std::uint16_t index = 0;
  std::int32_t delta = 0;  // s1 range narrow, s2 under wide
  bool operator==(const IincArgs&) const = default;
};

struct MemberRef {
  std::string owner;
  std::string name;
  std::string descriptor;
  bool operator==(const MemberRef&) const = default;
};

struct TypeRef {
  std::string name;  // binary class name or array descriptor, as in CONSTANT_Class
  bool operator==(const TypeRef&) const = default;
};

struct NewArrayType {
  std::uint8_t atype = 0;  // 4..11 per the newarray table
  bool operator==(const NewArrayType&) const = default;
};

struct MultiArrayArgs {
  std::string name;
  std::uint8_t dims = 0;
  bool operator==(const MultiArrayArgs&) const = default;
};

struct BranchTarget {
  std::uint32_t index = 0;
  bool operator==(const BranchTarget&) const = default;
};

struct SwitchTable {
  std::uint32_t default_target = 0;
  std::vector<std::pair<std::int32_t, std::uint32_t>> cases;  // key -> instruction index
  bool operator==(const SwitchTable&) const = default;
};

using Operand = std::variant<std::monostate, Imm, LocalVar, IincArgs, ConstantValue, MemberRef,
                             TypeRef, NewArrayType, MultiArrayArgs, BranchTarget, SwitchTable>;

/// One symbolically resolved bytecode instruction.
struct Instruction {
  Opcode op = Opcode::nop;
  Operand operand;

  bool operator==(const Instruction&) const = default;

  static Instruction simple(Opcode o) { return Instruction{o, std::monostate{}}; }
  static Instruction imm(Opcode o, std::int32_t v) { return Instruction{o, Imm{v}}; }
  static Instruction local(Opcode o, std::uint16_t idx) { return Instruction{o, LocalVar{idx}}; }
  static Instruction iinc(std::uint16_t idx, std::int32_t d) {
    return Instruction{Opcode::iinc, IincArgs{idx, d}};
  }
  static Instruction load_const(ConstantValue c) {
    Opcode o = c.is_wide() ? Opcode::ldc2_w : Opcode::ldc;
    return Instruction{o, std::move(c)};
  }
  static Instruction member(Opcode o, std::string owner, std::string name, std::string desc) {
    return Instruction{o, MemberRef{std::move(owner), std::move(name), std::move(desc)}};
  }
  static Instruction type(Opcode o, std::string name) { return Instruction{o, TypeRef{std::move(name)}}; }
  static Instruction branch(Opcode o, std::uint32_t target) { return Instruction{o, BranchTarget{target}}; }
};

inline OperandKind operand_kind(Opcode op) {
  const OpcodeInfo* info = opcode_info(static_cast<std::uint8_t>(op));
  return info ? info->operand : OperandKind::Internal;
}

}  // namespace aspa

#endif  // ASPA_INSTRUCTION_HPP
