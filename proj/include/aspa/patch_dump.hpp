#ifndef ASPA_PATCH_DUMP_HPP
#define ASPA_PATCH_DUMP_HPP

#include <cstdio>
#include <string>
#include <variant>

#include "aspa/ast.hpp"
#include "aspa/patch.hpp"

namespace aspa {

namespace detail {

inline std::string hex_flags(std::uint16_t flags) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04x", flags);
  return buf;
}

inline std::string render_version(std::uint32_t version) {
  return std::to_string(version >> 16) + "." + std::to_string(version & 0xFFFF);
}

/// "int getX()"; constructors render as "Foo()" like the class they build.
inline std::string render_signature(const Signature& sig, const std::string& class_name) {
  if (sig.name == "<init>") {
    std::string s = class_simple_name(class_name) + "(";
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
      if (i) s += ", ";
      s += sig.args[i].pretty();
    }
    return s + ")";
  }
  return sig.pretty();
}

inline std::string render_member_call(const MemberRef& m) {
  auto [args, ret] = parse_method_descriptor(m.descriptor);
  std::string list;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) list += ", ";
    list += args[i].pretty();
  }
  if (m.name == "<init>") return m.owner + "(" + list + ")";
  return m.owner + "." + m.name + "(" + list + ")";
}

inline std::string render_instruction(const Instruction& in) {
  std::string s = mnemonic(in.op);
  switch (operand_kind(in.op)) {
    case OperandKind::None:
      break;
    case OperandKind::Imm8:
    case OperandKind::Imm16:
      s += " " + std::to_string(std::get<Imm>(in.operand).value);
      break;
    case OperandKind::Local:
      s += " " + std::to_string(std::get<LocalVar>(in.operand).index);
      break;
    case OperandKind::LocalInc: {
      const auto& inc = std::get<IincArgs>(in.operand);
      s += " " + std::to_string(inc.index) + " " + std::to_string(inc.delta);
      break;
    }
    case OperandKind::Const:
    case OperandKind::DynamicRef:
      s += " " + std::get<ConstantValue>(in.operand).pretty();
      break;
    case OperandKind::FieldRef:
      s += " " + std::get<MemberRef>(in.operand).name;
      break;
    case OperandKind::MethodRef:
    case OperandKind::InterfaceRef:
      s += " " + render_member_call(std::get<MemberRef>(in.operand));
      break;
    case OperandKind::Type:
      s += " " + std::get<TypeRef>(in.operand).name;
      break;
    case OperandKind::NewArrayType: {
      static const char* names[] = {"boolean", "char", "float", "double", "byte", "short", "int",
                                    "long"};
      std::uint8_t atype = std::get<NewArrayType>(in.operand).atype;
      s += atype >= 4 && atype <= 11 ? std::string(" ") + names[atype - 4]
                                     : " " + std::to_string(atype);
      break;
    }
    case OperandKind::MultiArray: {
      const auto& ma = std::get<MultiArrayArgs>(in.operand);
      s += " " + ma.name + " " + std::to_string(ma.dims);
      break;
    }
    case OperandKind::Branch:
      s += " ->" + std::to_string(std::get<BranchTarget>(in.operand).index);
      break;
    case OperandKind::Switch:
      s += " (" + std::to_string(std::get<SwitchTable>(in.operand).cases.size()) + " cases)";
      break;
    case OperandKind::Internal:
      break;
  }
  return s;
}

inline std::string render_field(const FieldAst& f) {
  return "name=" + f.name + " type=" + f.type.pretty() + " flags=" + hex_flags(f.flags);
}

class PatchDumper {
 public:
  explicit PatchDumper(std::string class_name) : class_name_(std::move(class_name)) {}

  std::string run(const ClassPatch& p) {
    if (p.unchanged()) return "= " + class_name_ + "\n";
    open("p " + class_name_);
    if (p.version) line("p version " + render_version(*p.version));
    if (p.flags) line("p flags " + hex_flags(*p.flags));
    if (p.class_type) line("p class " + *p.class_type);
    if (p.superclass) line("p superclass " + (*p.superclass ? **p.superclass : "<none>"));
    if (!p.constants.unchanged()) {
      open("p constants");
      for (const auto& c : p.constants.removed) line("- " + c.pretty());
      for (const auto& c : p.constants.added) line("+ " + c.pretty());
      close();
    }
    if (!p.interfaces.unchanged()) {
      open("p interfaces");
      for (const auto& k : p.interfaces.removed) line("- " + k);
      for (const auto& k : p.interfaces.added) line("+ " + k);
      close();
    }
    if (!p.fields.unchanged()) {
      open("p fields");
      for (const auto& [key, child] : p.fields.patched) {
        open("p name=" + key);
        field_patch(child);
        close();
      }
      for (const auto& k : p.fields.removed) line("- name=" + k);
      for (const auto& f : p.fields.added) line("+ " + render_field(f));
      close();
    }
    if (!p.methods.unchanged()) {
      open("p methods");
      for (const auto& [key, child] : p.methods.patched) {
        open("p " + render_signature(key, class_name_));
        method_patch(child);
        close();
      }
      for (const auto& k : p.methods.removed) line("- " + render_signature(k, class_name_));
      for (const auto& m : p.methods.added)
        line("+ " + render_signature(m.signature, class_name_));
      close();
    }
    if (!p.attributes.unchanged()) attr_set(p.attributes);
    close();
    return std::move(out_);
  }

 private:
  void open(const std::string& header) {
    line(header + " {");
    ++depth_;
  }

  void close() {
    --depth_;
    line("}");
  }

  void line(const std::string& text) {
    out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  void field_patch(const FieldPatch& p) {
    if (p.type) line("p type " + p.type->pretty());
    if (p.flags) line("p flags " + hex_flags(*p.flags));
    if (!p.attributes.unchanged()) attr_set(p.attributes);
  }

  void method_patch(const MethodPatch& p) {
    if (p.flags) line("p flags " + hex_flags(*p.flags));
    if (!p.attributes.unchanged()) attr_set(p.attributes);
  }

  void attr_set(const AttrSetPatch& p) {
    open("p attributes");
    for (const auto& [key, child] : p.patched) attr_patch(key, child);
    for (const auto& k : p.removed) line("- " + k);
    for (const auto& a : p.added) line("+ " + a.name);
    close();
  }

  template <typename T, typename ItemPatch, typename RenderItem, typename RenderChild>
  void seq(const char* what, const SeqPatch<T, ItemPatch>& p, RenderItem render_item,
           RenderChild render_child) {
    for (const auto& op : p.ops) {
      switch (op.kind) {
        case SeqOpKind::Copy:
          line("= (" + std::to_string(op.count) + " " + what + (op.count == 1 ? ")" : "s)"));
          break;
        case SeqOpKind::Delete:
          line("- (" + std::to_string(op.count) + " " + what + (op.count == 1 ? ")" : "s)"));
          break;
        case SeqOpKind::Insert:
          for (const auto& item : op.items) line("+ " + render_item(item));
          break;
        case SeqOpKind::PatchItem:
          render_child(op.item_patch);
          break;
      }
    }
  }

  template <typename T, typename ItemPatch, typename RenderItem>
  void seq(const char* what, const SeqPatch<T, ItemPatch>& p, RenderItem render_item) {
    seq(what, p, render_item, [](const ItemPatch&) {});
  }

  void attr_patch(const std::string& name, const AttributePatch& p) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, CodePatch>) {
            open("p Code");
            if (v.max_stack) line("p max_stack " + std::to_string(*v.max_stack));
            if (v.max_locals) line("p locals " + std::to_string(*v.max_locals));
            if (!v.instructions.unchanged()) {
              open("p instructions");
              seq("instruction", v.instructions,
                  [](const Instruction& in) { return render_instruction(in); });
              close();
            }
            if (!v.handlers.unchanged()) {
              open("p handlers");
              seq("handler", v.handlers,
                  [](const ExceptionHandler& h) {
                    return "try [" + std::to_string(h.start) + ", " + std::to_string(h.end) +
                           ") -> " + std::to_string(h.handler) + " catch " +
                           (h.catch_type ? *h.catch_type : "<any>");
                  },
                  [this](const HandlerPatch& hp) {
                    open("p handler");
                    if (hp.start) line("p start " + std::to_string(*hp.start));
                    if (hp.end) line("p end " + std::to_string(*hp.end));
                    if (hp.handler) line("p target " + std::to_string(*hp.handler));
                    if (hp.catch_type)
                      line("p catch " + (*hp.catch_type ? **hp.catch_type : "<any>"));
                    close();
                  });
              close();
            }
            if (!v.attributes.unchanged()) attr_set(v.attributes);
            close();
          } else if constexpr (std::is_same_v<T, StringSeqPatch>) {
            open("p " + name);
            seq("type", v, [](const std::string& s) { return s; });
            close();
          } else if constexpr (std::is_same_v<T, ScalarPatch<ConstantValue>>) {
            line("p " + name + " " + v->pretty());
          } else if constexpr (std::is_same_v<T, ScalarPatch<std::string>>) {
            line("p " + name + " " + *v);
          } else if constexpr (std::is_same_v<T, InnerClassSeqPatch>) {
            open("p " + name);
            seq("entry", v, [](const InnerClassRow& row) {
              return (row.inner ? *row.inner : "<none>") + " in " +
                     (row.outer ? *row.outer : "<none>");
            });
            close();
          } else if constexpr (std::is_same_v<T, LineSeqPatch>) {
            open("p " + name);
            seq("line", v, [](const LineEntry& e) {
              return "at " + std::to_string(e.instruction) + " line " + std::to_string(e.line);
            });
            close();
          } else if constexpr (std::is_same_v<T, FrameSeqPatch>) {
            open("p " + name);
            seq("frame", v, [](const StackMapFrame& f) {
              return "frame at " + std::to_string(f.at_instruction);
            });
            close();
          } else if constexpr (std::is_same_v<T, ScalarPatch<Bytes>>) {
            line("p " + name + " (" + std::to_string(v->size()) + " bytes)");
          }
        },
        p.content);
  }

  std::string class_name_;
  std::string out_;
  int depth_ = 0;
};

}  // namespace detail

/// Human-readable rendering of a class patch, one mark per line: `p` for
/// patched sections, `+`/`-` for added and removed members or sequence
/// items, `=` for unchanged runs.
inline std::string dump_patch(const ClassPatch& p, const std::string& class_name) {
  return detail::PatchDumper(class_name).run(p);
}

/// Archive-level rendering: each class section followed by whole-entry
/// deltas for resources.
inline std::string dump_patch(const ArchivePatch& p) {
  std::string out;
  for (const auto& [name, cp] : p.patched) out += dump_patch(cp, name);
  for (const auto& name : p.removed) out += "- class " + name + "\n";
  for (const auto& [name, ast] : p.added) out += "+ class " + name + "\n";
  for (const auto& [name, delta] : p.other_entries) {
    switch (delta.kind) {
      case ArchivePatch::ResourceDelta::Kind::Added:
        out += "+ resource " + name + " (" + std::to_string(delta.bytes.size()) + " bytes)\n";
        break;
      case ArchivePatch::ResourceDelta::Kind::Removed:
        out += "- resource " + name + "\n";
        break;
      case ArchivePatch::ResourceDelta::Kind::Replaced:
        out += "p resource " + name + " (" + std::to_string(delta.bytes.size()) + " bytes)\n";
        break;
    }
  }
  if (out.empty()) out = "= (archives are equal)\n";
  return out;
}

}  // namespace aspa

#endif  // ASPA_PATCH_DUMP_HPP
