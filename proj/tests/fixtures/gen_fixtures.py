#!/usr/bin/env python3
"""Builds the binary class-file and archive fixtures used by the test suite.

The generator is deliberately independent of the C++ library: it assembles
JVM class files directly (pool layout, code bytes, stack-map frames), so the
fixtures act as an external oracle for the parser and emitter. It also emits
"permuted" variants of some classes -- identical logical content with a
shuffled constant pool and reversed member order -- used by the
order-independence tests, and a handful of deliberately malformed files.

Run from anywhere:  python3 gen_fixtures.py
Outputs are written next to this script and are checked in.
"""

import io
import os
import random
import struct
import zlib

OUT_DIR = os.path.dirname(os.path.abspath(__file__))

# ---------------------------------------------------------------------------
# Constant pool
# ---------------------------------------------------------------------------

TAGS = {"u": 1, "i": 3, "f": 4, "j": 5, "d": 6, "c": 7, "s": 8,
        "F": 9, "M": 10, "I": 11, "nat": 12, "mh": 15, "mt": 16, "indy": 18}


def utf(s):
    return ("u", s)


def cls(name):
    return ("c", name)


class Pool:
    """Insertion-ordered constant pool with automatic dependencies."""

    def __init__(self):
        self.order = []
        self.seen = set()

    def add(self, key):
        if key in self.seen:
            return key
        kind = key[0]
        if kind in ("c", "s", "mt"):
            self.add(utf(key[1]))
        elif kind == "nat":
            self.add(utf(key[1]))
            self.add(utf(key[2]))
        elif kind in ("F", "M", "I"):
            self.add(cls(key[1]))
            self.add(("nat", key[2], key[3]))
        elif kind == "mh":
            self.add(key[2])
        elif kind == "indy":
            self.add(("nat", key[2], key[3]))
        self.seen.add(key)
        self.order.append(key)
        return key

    def finalize(self, shuffle_seed=None):
        order = list(self.order)
        if shuffle_seed is not None:
            random.Random(shuffle_seed).shuffle(order)
        self.index = {}
        next_idx = 1
        for key in order:
            self.index[key] = next_idx
            next_idx += 2 if key[0] in ("j", "d") else 1
        self.count = next_idx
        self.final_order = order

    def idx(self, key):
        return self.index[key]

    def emit(self, out):
        out += struct.pack(">H", self.count)
        for key in self.final_order:
            kind = key[0]
            out += struct.pack(">B", TAGS[kind])
            if kind == "u":
                raw = key[1].encode("utf-8")
                out += struct.pack(">H", len(raw)) + raw
            elif kind in ("i", "f"):
                out += struct.pack(">I", key[1] & 0xFFFFFFFF)
            elif kind in ("j", "d"):
                out += struct.pack(">Q", key[1] & 0xFFFFFFFFFFFFFFFF)
            elif kind in ("c", "s", "mt"):
                out += struct.pack(">H", self.idx(utf(key[1])))
            elif kind == "nat":
                out += struct.pack(">HH", self.idx(utf(key[1])), self.idx(utf(key[2])))
            elif kind in ("F", "M", "I"):
                out += struct.pack(">HH", self.idx(cls(key[1])), self.idx(("nat", key[2], key[3])))
            elif kind == "mh":
                out += struct.pack(">BH", key[1], self.idx(key[2]))
            elif kind == "indy":
                out += struct.pack(">HH", key[1], self.idx(("nat", key[2], key[3])))
        return out


# ---------------------------------------------------------------------------
# Bytecode assembler
# ---------------------------------------------------------------------------

SIMPLE = {
    "nop": 0x00, "aconst_null": 0x01, "iconst_m1": 0x02, "iconst_0": 0x03,
    "iconst_1": 0x04, "iconst_2": 0x05, "iconst_3": 0x06, "iconst_4": 0x07,
    "iconst_5": 0x08, "lconst_0": 0x09, "lconst_1": 0x0A, "fconst_0": 0x0B,
    "fconst_1": 0x0C, "fconst_2": 0x0D, "dconst_0": 0x0E, "dconst_1": 0x0F,
    "iload_0": 0x1A, "iload_1": 0x1B, "iload_2": 0x1C, "iload_3": 0x1D,
    "lload_0": 0x1E, "lload_2": 0x20, "dload_0": 0x26, "dload_2": 0x28,
    "aload_0": 0x2A, "aload_1": 0x2B, "aload_2": 0x2C, "aload_3": 0x2D,
    "istore_1": 0x3C, "istore_2": 0x3D, "astore_2": 0x4D,
    "pop": 0x57, "pop2": 0x58, "dup": 0x59, "swap": 0x5F,
    "iadd": 0x60, "dadd": 0x63, "isub": 0x64, "imul": 0x68, "idiv": 0x6C,
    "ineg": 0x74, "l2d": 0x8A, "i2l": 0x85,
    "lcmp": 0x94,
    "ireturn": 0xAC, "lreturn": 0xAD, "freturn": 0xAE, "dreturn": 0xAF,
    "areturn": 0xB0, "return": 0xB1,
    "arraylength": 0xBE, "athrow": 0xBF,
}

BRANCHES = {
    "ifeq": 0x99, "ifne": 0x9A, "iflt": 0x9B, "ifge": 0x9C, "ifgt": 0x9D,
    "ifle": 0x9E, "if_icmpeq": 0x9F, "if_icmpne": 0xA0, "if_icmplt": 0xA1,
    "if_icmpge": 0xA2, "if_icmpgt": 0xA3, "if_icmple": 0xA4,
    "if_acmpeq": 0xA5, "if_acmpne": 0xA6, "goto": 0xA7, "jsr": 0xA8,
    "ifnull": 0xC6, "ifnonnull": 0xC7,
}

LOCALS = {"iload": 0x15, "lload": 0x16, "fload": 0x17, "dload": 0x18,
          "aload": 0x19, "istore": 0x36, "lstore": 0x37, "fstore": 0x38,
          "dstore": 0x39, "astore": 0x3A, "ret": 0xA9}

MEMBERS = {"getstatic": (0xB2, "F"), "putstatic": (0xB3, "F"),
           "getfield": (0xB4, "F"), "putfield": (0xB5, "F"),
           "invokevirtual": (0xB6, "M"), "invokespecial": (0xB7, "M"),
           "invokestatic": (0xB8, "M")}

TYPE_OPS = {"new": 0xBB, "anewarray": 0xBD, "checkcast": 0xC0, "instanceof": 0xC1}


def arg_slots(desc):
    """Stack slots taken by the arguments of a method descriptor."""
    slots, i = 0, 1
    while desc[i] != ")":
        c = desc[i]
        while c == "[":
            i += 1
            c = desc[i]
        if c == "L":
            i = desc.index(";", i)
            slots += 1
        elif c in "JD":
            slots += 2
        else:
            slots += 1
        i += 1
    return slots


class Assembler:
    """Two-pass assembler: first pass sizes, second pass emits bytes."""

    def __init__(self, pool, instructions):
        self.pool = pool
        self.ins = instructions
        for op in instructions:
            self._collect(op)

    def _collect(self, op):
        name = op[0]
        if name in MEMBERS:
            self.pool.add((MEMBERS[name][1], op[1], op[2], op[3]))
        elif name == "invokeinterface":
            self.pool.add(("I", op[1], op[2], op[3]))
        elif name in TYPE_OPS or name == "multianewarray":
            self.pool.add(cls(op[1]))
        elif name in ("ldc", "ldc2_w", "ldc_wide"):
            self.pool.add(op[1])

    def _size(self, op, offset):
        name = op[0]
        if name == "label":
            return 0
        if name in SIMPLE:
            return 1
        if name in BRANCHES:
            return 3
        if name in ("goto_w", "jsr_w"):
            return 5
        if name in LOCALS:
            idx = op[1]
            return 4 if idx > 255 else 2
        if name == "iinc":
            idx, delta = op[1], op[2]
            return 6 if idx > 255 or not (-128 <= delta <= 127) else 3
        if name in ("bipush",):
            return 2
        if name in ("sipush",):
            return 3
        if name == "ldc":
            return 2 if self.pool.idx(op[1]) <= 255 else 3
        if name == "ldc_wide":  # force the wide encoding regardless of index
            return 3
        if name == "ldc2_w":
            return 3
        if name in MEMBERS or name in TYPE_OPS:
            return 3
        if name == "invokeinterface":
            return 5
        if name == "newarray":
            return 2
        if name == "multianewarray":
            return 4
        if name == "tableswitch":
            pad = (4 - ((offset + 1) % 4)) % 4
            return 1 + pad + 12 + 4 * len(op[3])
        if name == "lookupswitch":
            pad = (4 - ((offset + 1) % 4)) % 4
            return 1 + pad + 8 + 8 * len(op[2])
        raise ValueError("unknown instruction " + name)

    def assemble(self):
        # pass 1: offsets
        self.labels = {}
        offset = 0
        for op in self.ins:
            if op[0] == "label":
                self.labels[op[1]] = offset
            else:
                offset += self._size(op, offset)
        # pass 2: bytes
        out = bytearray()
        for op in self.ins:
            name = op[0]
            at = len(out)
            if name == "label":
                continue
            if name in SIMPLE:
                out.append(SIMPLE[name])
            elif name in BRANCHES:
                out.append(BRANCHES[name])
                out += struct.pack(">h", self.labels[op[1]] - at)
            elif name in ("goto_w", "jsr_w"):
                out.append(0xC8 if name == "goto_w" else 0xC9)
                out += struct.pack(">i", self.labels[op[1]] - at)
            elif name in LOCALS:
                idx = op[1]
                if idx > 255:
                    out += struct.pack(">BBH", 0xC4, LOCALS[name], idx)
                else:
                    out += struct.pack(">BB", LOCALS[name], idx)
            elif name == "iinc":
                idx, delta = op[1], op[2]
                if idx > 255 or not (-128 <= delta <= 127):
                    out += struct.pack(">BBHh", 0xC4, 0x84, idx, delta)
                else:
                    out += struct.pack(">BBb", 0x84, idx, delta)
            elif name == "bipush":
                out += struct.pack(">Bb", 0x10, op[1])
            elif name == "sipush":
                out += struct.pack(">Bh", 0x11, op[1])
            elif name == "ldc":
                idx = self.pool.idx(op[1])
                if idx <= 255:
                    out += struct.pack(">BB", 0x12, idx)
                else:
                    out += struct.pack(">BH", 0x13, idx)
            elif name == "ldc_wide":
                out += struct.pack(">BH", 0x13, self.pool.idx(op[1]))
            elif name == "ldc2_w":
                out += struct.pack(">BH", 0x14, self.pool.idx(op[1]))
            elif name in MEMBERS:
                code, kind = MEMBERS[name]
                out += struct.pack(">BH", code, self.pool.idx((kind, op[1], op[2], op[3])))
            elif name == "invokeinterface":
                count = arg_slots(op[3]) + 1
                out += struct.pack(">BHBB", 0xB9, self.pool.idx(("I", op[1], op[2], op[3])), count, 0)
            elif name in TYPE_OPS:
                out += struct.pack(">BH", TYPE_OPS[name], self.pool.idx(cls(op[1])))
            elif name == "newarray":
                out += struct.pack(">BB", 0xBC, op[1])
            elif name == "multianewarray":
                out += struct.pack(">BHB", 0xC5, self.pool.idx(cls(op[1])), op[2])
            elif name == "tableswitch":
                out.append(0xAA)
                while len(out) % 4:
                    out.append(0)
                default, low, targets = op[1], op[2], op[3]
                out += struct.pack(">iii", self.labels[default] - at, low, low + len(targets) - 1)
                for t in targets:
                    out += struct.pack(">i", self.labels[t] - at)
            elif name == "lookupswitch":
                out.append(0xAB)
                while len(out) % 4:
                    out.append(0)
                default, pairs = op[1], op[2]
                out += struct.pack(">ii", self.labels[default] - at, len(pairs))
                for key, t in sorted(pairs):
                    out += struct.pack(">ii", key, self.labels[t] - at)
        return bytes(out)


# ---------------------------------------------------------------------------
# Stack map frames
# ---------------------------------------------------------------------------


def vtype_bytes(pool, vt, labels):
    kind = vt[0]
    basic = {"top": 0, "int": 1, "float": 2, "double": 3, "long": 4,
             "null": 5, "uninit_this": 6}
    if kind in basic:
        return struct.pack(">B", basic[kind])
    if kind == "object":
        return struct.pack(">BH", 7, pool.idx(cls(vt[1])))
    if kind == "uninit":
        return struct.pack(">BH", 8, labels[vt[1]])
    raise ValueError(kind)


def stack_map_bytes(pool, frames, labels):
    out = struct.pack(">H", len(frames))
    prev = -1
    for label, spec in frames:
        offset = labels[label]
        delta = offset if prev < 0 else offset - prev - 1
        prev = offset
        kind = spec[0]
        if kind == "same":
            out += struct.pack(">B", delta) if delta <= 63 else struct.pack(">BH", 251, delta)
        elif kind == "same1":
            if delta <= 63:
                out += struct.pack(">B", 64 + delta)
            else:
                out += struct.pack(">BH", 247, delta)
            out += vtype_bytes(pool, spec[1], labels)
        elif kind == "chop":
            out += struct.pack(">BH", 251 - spec[1], delta)
        elif kind == "append":
            out += struct.pack(">BH", 251 + len(spec[1]), delta)
            for vt in spec[1]:
                out += vtype_bytes(pool, vt, labels)
        elif kind == "full":
            out += struct.pack(">BHH", 255, delta, len(spec[1]))
            for vt in spec[1]:
                out += vtype_bytes(pool, vt, labels)
            out += struct.pack(">H", len(spec[2]))
            for vt in spec[2]:
                out += vtype_bytes(pool, vt, labels)
        else:
            raise ValueError(kind)
    return out


# ---------------------------------------------------------------------------
# Class writer
# ---------------------------------------------------------------------------


class Method:
    def __init__(self, name, desc, flags, code=None, max_stack=0, max_locals=0,
                 handlers=(), frames=(), lines=(), exceptions=(), extra_attrs=(),
                 raw_code_override=None):
        self.name, self.desc, self.flags = name, desc, flags
        self.code = code
        self.max_stack, self.max_locals = max_stack, max_locals
        self.handlers = handlers          # (start_lbl, end_lbl, handler_lbl, class_or_None)
        self.frames = frames              # (label, frame_spec)
        self.lines = lines                # (label, line_no)
        self.exceptions = exceptions      # class names
        self.extra_attrs = extra_attrs    # ("Deprecated",) / ("Synthetic",)
        self.raw_code_override = raw_code_override


class Field:
    def __init__(self, name, desc, flags, const=None, extra_attrs=()):
        self.name, self.desc, self.flags = name, desc, flags
        self.const = const                # pool key for ConstantValue
        self.extra_attrs = extra_attrs


class ClassBuilder:
    def __init__(self, name, superclass="java/lang/Object", major=49, flags=0x0020):
        self.name, self.superclass, self.major, self.flags = name, superclass, major, flags
        self.interfaces = []
        self.fields = []
        self.methods = []
        self.source_file = None
        self.signature = None
        self.inner_classes = []           # (inner, outer, inner_name, flags) names or None
        self.deprecated = False
        self.raw_attrs = []               # (name, bytes): carried opaquely by parsers
        self.extra_pool = []              # pool keys emitted without any reference

    def build(self, shuffle_seed=None, reverse_members=False):
        pool = Pool()
        pool.add(cls(self.name))
        pool.add(cls(self.superclass))
        interfaces = list(self.interfaces)
        fields = list(self.fields)
        methods = list(self.methods)
        if reverse_members:
            interfaces.reverse()
            fields.reverse()
            methods.reverse()
        for i in interfaces:
            pool.add(cls(i))
        for f in fields:
            pool.add(utf(f.name))
            pool.add(utf(f.desc))
            if f.const is not None:
                pool.add(utf("ConstantValue"))
                pool.add(f.const)
            for a in f.extra_attrs:
                pool.add(utf(a))
        assemblers = {}
        for m in methods:
            pool.add(utf(m.name))
            pool.add(utf(m.desc))
            if m.code is not None:
                pool.add(utf("Code"))
                assemblers[id(m)] = Assembler(pool, m.code)
                for _, _, _, c in m.handlers:
                    if c is not None:
                        pool.add(cls(c))
                for _, spec in m.frames:
                    pool.add(utf("StackMapTable"))
                    for part in spec[1:]:
                        for vt in (part if isinstance(part, list) else [part]):
                            if isinstance(vt, tuple) and vt[0] == "object":
                                pool.add(cls(vt[1]))
                if m.lines:
                    pool.add(utf("LineNumberTable"))
            if m.exceptions:
                pool.add(utf("Exceptions"))
                for e in m.exceptions:
                    pool.add(cls(e))
            for a in m.extra_attrs:
                pool.add(utf(a[0] if isinstance(a, tuple) else a))
        if self.source_file:
            pool.add(utf("SourceFile"))
            pool.add(utf(self.source_file))
        if self.signature:
            pool.add(utf("Signature"))
            pool.add(utf(self.signature))
        if self.inner_classes:
            pool.add(utf("InnerClasses"))
            for inner, outer, iname, _ in self.inner_classes:
                if inner:
                    pool.add(cls(inner))
                if outer:
                    pool.add(cls(outer))
                if iname:
                    pool.add(utf(iname))
        if self.deprecated:
            pool.add(utf("Deprecated"))
        for name, _ in self.raw_attrs:
            pool.add(utf(name))
        for key in self.extra_pool:
            pool.add(key)

        pool.finalize(shuffle_seed)

        def attribute(name, body):
            return struct.pack(">HI", pool.idx(utf(name)), len(body)) + body

        out = bytearray()
        out += struct.pack(">IHH", 0xCAFEBABE, 0, self.major)
        pool.emit(out)
        out += struct.pack(">HHH", self.flags, pool.idx(cls(self.name)), pool.idx(cls(self.superclass)))
        out += struct.pack(">H", len(interfaces))
        for i in interfaces:
            out += struct.pack(">H", pool.idx(cls(i)))
        out += struct.pack(">H", len(fields))
        for f in fields:
            out += struct.pack(">HHH", f.flags, pool.idx(utf(f.name)), pool.idx(utf(f.desc)))
            attrs = []
            if f.const is not None:
                attrs.append(attribute("ConstantValue", struct.pack(">H", pool.idx(f.const))))
            for a in f.extra_attrs:
                attrs.append(attribute(a, b""))
            out += struct.pack(">H", len(attrs)) + b"".join(attrs)
        out += struct.pack(">H", len(methods))
        for m in methods:
            out += struct.pack(">HHH", m.flags, pool.idx(utf(m.name)), pool.idx(utf(m.desc)))
            attrs = []
            if m.code is not None:
                asm = assemblers[id(m)]
                code_bytes = asm.assemble()
                if m.raw_code_override is not None:
                    code_bytes = m.raw_code_override
                body = struct.pack(">HHI", m.max_stack, m.max_locals, len(code_bytes)) + code_bytes
                body += struct.pack(">H", len(m.handlers))
                for start, end, handler, c in m.handlers:
                    catch = pool.idx(cls(c)) if c else 0
                    body += struct.pack(">HHHH", asm.labels[start], asm.labels[end],
                                        asm.labels[handler], catch)
                sub = []
                if m.lines:
                    lnt = struct.pack(">H", len(m.lines))
                    for label, line in m.lines:
                        lnt += struct.pack(">HH", asm.labels[label], line)
                    sub.append(attribute("LineNumberTable", lnt))
                if m.frames:
                    sub.append(attribute("StackMapTable",
                                         stack_map_bytes(pool, m.frames, asm.labels)))
                body += struct.pack(">H", len(sub)) + b"".join(sub)
                attrs.append(attribute("Code", body))
            if m.exceptions:
                exc = struct.pack(">H", len(m.exceptions))
                for e in m.exceptions:
                    exc += struct.pack(">H", pool.idx(cls(e)))
                attrs.append(attribute("Exceptions", exc))
            for a in m.extra_attrs:
                if isinstance(a, tuple):
                    attrs.append(attribute(a[0], a[1]))
                else:
                    attrs.append(attribute(a, b""))
            out += struct.pack(">H", len(attrs)) + b"".join(attrs)
        cattrs = []
        if self.source_file:
            cattrs.append(attribute("SourceFile", struct.pack(">H", pool.idx(utf(self.source_file)))))
        if self.signature:
            cattrs.append(attribute("Signature", struct.pack(">H", pool.idx(utf(self.signature)))))
        if self.inner_classes:
            body = struct.pack(">H", len(self.inner_classes))
            for inner, outer, iname, fl in self.inner_classes:
                body += struct.pack(">HHHH",
                                    pool.idx(cls(inner)) if inner else 0,
                                    pool.idx(cls(outer)) if outer else 0,
                                    pool.idx(utf(iname)) if iname else 0,
                                    fl)
            cattrs.append(attribute("InnerClasses", body))
        if self.deprecated:
            cattrs.append(attribute("Deprecated", b""))
        for name, body in self.raw_attrs:
            cattrs.append(attribute(name, body))
        out += struct.pack(">H", len(cattrs)) + b"".join(cattrs)
        return bytes(out)


# ---------------------------------------------------------------------------
# Fixture classes
# ---------------------------------------------------------------------------


def foo_old(debug=False):
    b = ClassBuilder("toy/Foo", major=49, flags=0x0020)
    b.fields = [Field("x", "I", 0x0002)]
    init = Method("<init>", "()V", 0x0001, max_stack=2, max_locals=1, code=[
        ("label", "start"),
        ("aload_0",),
        ("invokespecial", "java/lang/Object", "<init>", "()V"),
        ("aload_0",),
        ("iconst_0",),
        ("putfield", "toy/Foo", "x", "I"),
        ("return",),
    ], lines=[("start", 4)] if debug else ())
    sqx = Method("sqX", "()I", 0x0001, max_stack=2, max_locals=1, code=[
        ("label", "start"),
        ("aload_0",),
        ("getfield", "toy/Foo", "x", "I"),
        ("aload_0",),
        ("getfield", "toy/Foo", "x", "I"),
        ("imul",),
        ("ireturn",),
    ], lines=[("start", 5)] if debug else ())
    getx = Method("getX", "()I", 0x0001, max_stack=1, max_locals=1, code=[
        ("label", "start"),
        ("aload_0",),
        ("getfield", "toy/Foo", "x", "I"),
        ("ireturn",),
    ], lines=[("start", 6)] if debug else ())
    b.methods = [init, sqx, getx]
    if debug:
        b.source_file = "Foo.java"
    return b


def foo_new(debug=False):
    b = ClassBuilder("toy/Foo", major=49, flags=0x0020)
    b.fields = [Field("x", "I", 0x0002), Field("y", "I", 0x0002)]
    sqx = Method("sqX", "()I", 0x0001, max_stack=2, max_locals=1, code=[
        ("label", "start"),
        ("aload_0",),
        ("getfield", "toy/Foo", "x", "I"),
        ("aload_0",),
        ("getfield", "toy/Foo", "x", "I"),
        ("imul",),
        ("ireturn",),
    ], lines=[("start", 4)] if debug else ())
    init = Method("<init>", "()V", 0x0001, max_stack=2, max_locals=1, code=[
        ("label", "start"),
        ("aload_0",),
        ("invokespecial", "java/lang/Object", "<init>", "()V"),
        ("aload_0",),
        ("iconst_1",),
        ("putfield", "toy/Foo", "x", "I"),
        ("aload_0",),
        ("iconst_0",),
        ("putfield", "toy/Foo", "y", "I"),
        ("return",),
    ], lines=[("start", 6)] if debug else ())
    setx = Method("setX", "(I)V", 0x0001, max_stack=2, max_locals=2, code=[
        ("label", "start"),
        ("aload_0",),
        ("iload_1",),
        ("putfield", "toy/Foo", "x", "I"),
        ("return",),
    ], lines=[("start", 8)] if debug else ())
    b.methods = [sqx, init, setx]
    if debug:
        b.source_file = "Foo.java"
    return b


def zoo():
    b = ClassBuilder("toy/Zoo", major=49, flags=0x0021)
    b.interfaces = ["toy/IfaceA", "toy/IfaceB"]
    b.source_file = "Zoo.java"
    b.signature = "Ljava/lang/Object;"
    b.inner_classes = [("toy/Zoo$In", "toy/Zoo", "In", 0x0008)]
    b.deprecated = True
    b.raw_attrs = [("X-Custom", b"\x01\x02\x03 opaque payload")]
    b.extra_pool = [
        ("mh", 6, ("M", "toy/Zoo", "ldcs", "()V")),   # REF_invokeStatic handle
        ("indy", 3, "call", "(I)I"),
    ]
    b.fields = [
        Field("CONST_I", "I", 0x0019, const=("i", 42)),
        Field("CONST_J", "J", 0x0019, const=("j", 1234567890123)),
        Field("CONST_F", "F", 0x0019, const=("f", 0x3FC00000)),
        Field("CONST_NAN", "F", 0x0019, const=("f", 0x7FC00001)),
        Field("CONST_D", "D", 0x0019, const=("d", struct.unpack(">Q", struct.pack(">d", 2.75))[0])),
        Field("CONST_S", "Ljava/lang/String;", 0x0019, const=("s", "hello zoo")),
        Field("counter", "I", 0x000A),
        Field("data", "[[I", 0x0002),
    ]
    init = Method("<init>", "()V", 0x0001, max_stack=1, max_locals=1, code=[
        ("aload_0",),
        ("invokespecial", "java/lang/Object", "<init>", "()V"),
        ("return",),
    ])
    ldcs = Method("ldcs", "()V", 0x0009, max_stack=2, max_locals=0, code=[
        ("ldc", ("i", 100000)), ("pop",),
        ("ldc", ("f", 0x7FC00001)), ("pop",),
        ("ldc", ("s", "hello zoo")), ("pop",),
        ("ldc", ("c", "toy/Zoo")), ("pop",),
        ("ldc_wide", ("i", -7)), ("pop",),
        ("ldc", ("mt", "(I)V")), ("pop",),
        ("ldc2_w", ("j", 7)), ("pop2",),
        ("ldc2_w", ("d", 0x8000000000000000)), ("pop2",),
        ("return",),
    ])
    widey = Method("widey", "(I)I", 0x0009, max_stack=1, max_locals=301, code=[
        ("iload_0",),
        ("istore", 300),
        ("iinc", 300, 1000),
        ("iload", 300),
        ("ireturn",),
    ])
    use_iface = Method("useIface", "(Ljava/util/List;)I", 0x0009, max_stack=1, max_locals=1, code=[
        ("aload_0",),
        ("invokeinterface", "java/util/List", "size", "()I"),
        ("ireturn",),
    ])
    throws_decl = Method("throwsDecl", "()V", 0x0009, max_stack=0, max_locals=0,
                         code=[("return",)],
                         exceptions=["java/io/IOException", "java/lang/IllegalStateException"],
                         extra_attrs=("Deprecated",))
    hidden = Method("hidden", "()V", 0x0009, max_stack=0, max_locals=0,
                    code=[("return",)],
                    extra_attrs=("Synthetic", ("X-Note", b"\x07note")))
    arrays = Method("arrays", "()[[I", 0x0009, max_stack=2, max_locals=3, code=[
        ("iconst_3",),
        ("newarray", 10),             # int[]
        ("astore_2",),
        ("iconst_2",),
        ("iconst_2",),
        ("multianewarray", "[[I", 2),
        ("areturn",),
    ])
    long_math = Method("longMath", "(JD)D", 0x0009, max_stack=4, max_locals=4, code=[
        ("lload_0",),
        ("l2d",),
        ("dload_2",),
        ("dadd",),
        ("dreturn",),
    ])
    subby = Method("subby", "()V", 0x0009, max_stack=1, max_locals=3, code=[
        ("jsr", "L_sub"),
        ("goto_w", "L_done"),
        ("label", "L_sub"),
        ("astore_2",),
        ("ret", 2),
        ("label", "L_done"),
        ("jsr_w", "L_sub"),
        ("return",),
    ])
    native_op = Method("nativeOp", "(I)I", 0x0109)  # public static native
    b.methods = [init, ldcs, widey, use_iface, throws_decl, hidden, arrays, long_math,
                 subby, native_op]
    return b


def branchy():
    b = ClassBuilder("toy/Branchy", major=52, flags=0x0021)
    pick = Method("pick", "(I)I", 0x0009, max_stack=1, max_locals=1, code=[
        ("iload_0",),
        ("ifle", "L_neg"),
        ("iconst_1",),
        ("goto", "L_end"),
        ("label", "L_neg"),
        ("iconst_m1",),
        ("label", "L_end"),
        ("ireturn",),
    ], frames=[("L_neg", ("same",)), ("L_end", ("same1", ("int",)))])
    loop = Method("loop", "(I)I", 0x0009, max_stack=2, max_locals=2, code=[
        ("iconst_0",),
        ("istore_1",),
        ("label", "L_head"),
        ("iload_1",),
        ("iload_0",),
        ("if_icmpge", "L_done"),
        ("iinc", 1, 1),
        ("goto", "L_head"),
        ("label", "L_done"),
        ("iload_1",),
        ("ireturn",),
    ], frames=[("L_head", ("append", [("int",)])), ("L_done", ("same",))])
    sw = Method("sw", "(I)I", 0x0009, max_stack=1, max_locals=1, code=[
        ("iload_0",),
        ("tableswitch", "L_def", 1, ["L_a", "L_b", "L_c"]),
        ("label", "L_a"), ("iconst_1",), ("ireturn",),
        ("label", "L_b"), ("iconst_2",), ("ireturn",),
        ("label", "L_c"), ("iconst_3",), ("ireturn",),
        ("label", "L_def"),
        ("iload_0",),
        ("lookupswitch", "L_x", [(10, "L_ten"), (1000, "L_k")]),
        ("label", "L_ten"), ("bipush", 10), ("ireturn",),
        ("label", "L_k"), ("sipush", 1000), ("ireturn",),
        ("label", "L_x"), ("iconst_0",), ("ireturn",),
    ], frames=[("L_a", ("same",)), ("L_b", ("same",)), ("L_c", ("same",)),
               ("L_def", ("same",)), ("L_ten", ("same",)), ("L_k", ("same",)),
               ("L_x", ("same",))])
    safe_div = Method("safeDiv", "(II)I", 0x0009, max_stack=2, max_locals=3, code=[
        ("label", "L_try"),
        ("iload_0",),
        ("iload_1",),
        ("idiv",),
        ("label", "L_try_end"),
        ("ireturn",),
        ("label", "L_catch"),
        ("astore_2",),
        ("iconst_0",),
        ("ireturn",),
    ], handlers=[("L_try", "L_try_end", "L_catch", "java/lang/ArithmeticException")],
       frames=[("L_catch", ("full", [("int",), ("int",)],
                            [("object", "java/lang/ArithmeticException")]))])
    b.methods = [pick, loop, sw, safe_div]
    return b


# ---------------------------------------------------------------------------
# Malformed fixtures
# ---------------------------------------------------------------------------


def minimal_class(name="toy/Tiny", major=49, method_bytes=None):
    b = ClassBuilder(name, major=major, flags=0x0020)
    if method_bytes is not None:
        m = Method("run", "()V", 0x0009, max_stack=1, max_locals=1,
                   code=[("return",)], raw_code_override=method_bytes)
        b.methods = [m]
    return b.build()


def skip_pool(data):
    """Byte offset just past the constant pool of an assembled class."""
    count = struct.unpack_from(">H", data, 8)[0]
    pos, i = 10, 1
    while i < count:
        tag = data[pos]
        if tag == 1:
            ln = struct.unpack_from(">H", data, pos + 1)[0]
            pos += 3 + ln
        elif tag in (3, 4, 9, 10, 11, 12, 18):
            pos += 5
        elif tag in (5, 6):
            pos += 9
            i += 1
        elif tag in (7, 8, 16):
            pos += 3
        elif tag == 15:
            pos += 4
        else:
            raise ValueError("unknown tag %d" % tag)
        i += 1
    return pos


def bad_pool_ref_class():
    # One field whose name_index is forced to 0.
    b = ClassBuilder("toy/Tiny", major=49, flags=0x0020)
    b.fields = [Field("x", "I", 0x0002)]
    data = bytearray(b.build())
    pos = skip_pool(data)
    # access(2) this(2) super(2) ifcount(2) fields_count(2), then the first
    # field_info: flags(2) name_index(2).
    name_index_at = pos + 10 + 2
    data[name_index_at] = 0
    data[name_index_at + 1] = 0
    return bytes(data)


# ---------------------------------------------------------------------------
# Archives (manual writer: full control over order, timestamps, CRC, method)
# ---------------------------------------------------------------------------


class ZipEntrySpec:
    def __init__(self, name, data, deflate=False, dos_time=0x0000, dos_date=0x0021,
                 crc_override=None):
        self.name, self.data, self.deflate = name, data, deflate
        self.dos_time, self.dos_date = dos_time, dos_date
        self.crc_override = crc_override


def write_zip(path, entries):
    out = bytearray()
    central = bytearray()
    for e in entries:
        raw = e.data
        if e.deflate:
            comp = zlib.compressobj(9, zlib.DEFLATED, -15)
            stored = comp.compress(raw) + comp.flush()
            method = 8
        else:
            stored = raw
            method = 0
        crc = e.crc_override if e.crc_override is not None else zlib.crc32(raw) & 0xFFFFFFFF
        name = e.name.encode("utf-8")
        offset = len(out)
        out += struct.pack("<IHHHHHIIIHH", 0x04034B50, 20, 0, method, e.dos_time, e.dos_date,
                           crc, len(stored), len(raw), len(name), 0)
        out += name + stored
        central += struct.pack("<IHHHHHHIIIHHHHHII", 0x02014B50, 20, 20, 0, method,
                               e.dos_time, e.dos_date, crc, len(stored), len(raw),
                               len(name), 0, 0, 0, 0, 0, offset)
        central += name
    cd_offset = len(out)
    out += central
    out += struct.pack("<IHHHHIIH", 0x06054B50, 0, 0, len(entries), len(entries),
                       len(central), cd_offset, 0)
    with open(path, "wb") as f:
        f.write(out)


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------


def write(name, data):
    with open(os.path.join(OUT_DIR, name), "wb") as f:
        f.write(data)
    print("wrote %-28s %6d bytes" % (name, len(data)))


def main():
    foo_old_bytes = foo_old().build()
    foo_new_bytes = foo_new().build()
    write("Foo_old.class", foo_old_bytes)
    write("Foo_new.class", foo_new_bytes)
    write("Foo_old_debug.class", foo_old(debug=True).build())
    write("Foo_new_debug.class", foo_new(debug=True).build())
    write("Foo_old_permuted.class", foo_old().build(shuffle_seed=42, reverse_members=True))
    write("Zoo.class", zoo().build())
    write("Zoo_permuted.class", zoo().build(shuffle_seed=7, reverse_members=True))
    write("Branchy.class", branchy().build())
    write("Branchy_permuted.class", branchy().build(shuffle_seed=99, reverse_members=True))

    write("bad_magic.bin", b"NOTAJVMCLASSFILE" + bytes(16))
    write("truncated.class", foo_old_bytes[:30])
    write("bad_pool_ref.class", bad_pool_ref_class())
    write("future_version.class", minimal_class(major=59))
    write("ancient_version.class", minimal_class(major=44))
    # 0xFE is a reserved opcode.
    write("unknown_opcode.class", minimal_class(method_bytes=bytes([0xFE, 0xB1])))
    # goto +4 lands in the middle of the sipush that follows it.
    write("goto_midinstruction.class",
          minimal_class(method_bytes=bytes([0xA7, 0x00, 0x04, 0x11, 0x00, 0x07, 0xB1])))
    write("empty_code.class", minimal_class(method_bytes=b""))

    resource = b"just some resource bytes\n"
    write_zip(os.path.join(OUT_DIR, "arch_a.jar"), [
        ZipEntrySpec("toy/Foo.class", foo_old_bytes, deflate=True,
                     dos_time=0x4832, dos_date=0x5021),
        ZipEntrySpec("notes/readme.txt", resource, deflate=False,
                     dos_time=0x4832, dos_date=0x5021),
    ])
    # Same logical contents: reversed order, other timestamps, flipped
    # compression methods, and a deliberately wrong CRC on the resource.
    write_zip(os.path.join(OUT_DIR, "arch_b.jar"), [
        ZipEntrySpec("notes/readme.txt", resource, deflate=True,
                     dos_time=0x0001, dos_date=0x2921, crc_override=0xDEADBEEF),
        ZipEntrySpec("toy/Foo.class", foo_old_bytes, deflate=False,
                     dos_time=0x0002, dos_date=0x2921),
    ])
    write_zip(os.path.join(OUT_DIR, "signed.jar"), [
        ZipEntrySpec("META-INF/MANIFEST.MF", b"Manifest-Version: 1.0\n"),
        ZipEntrySpec("META-INF/SIG.SF", b"Signature-Version: 1.0\n"),
        ZipEntrySpec("META-INF/SIG.RSA", bytes(8)),
        ZipEntrySpec("toy/Foo.class", foo_old_bytes),
    ])
    write_zip(os.path.join(OUT_DIR, "multirelease.jar"), [
        ZipEntrySpec("META-INF/versions/9/toy/Foo.class", foo_old_bytes),
        ZipEntrySpec("toy/Foo.class", foo_old_bytes),
    ])
    write_zip(os.path.join(OUT_DIR, "dup_entry.zip"), [
        ZipEntrySpec("a.txt", b"one"),
        ZipEntrySpec("a.txt", b"two"),
    ])
    write_zip(os.path.join(OUT_DIR, "mismatch.jar"), [
        ZipEntrySpec("toy/Bar.class", foo_old_bytes),
    ])
    write_zip(os.path.join(OUT_DIR, "resource_only.zip"), [
        ZipEntrySpec("data/notes.txt", b"no classes here\n"),
    ])
    print("done")


if __name__ == "__main__":
    main()
