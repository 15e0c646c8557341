#ifndef ASPA_DIFF_HPP
#define ASPA_DIFF_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/myers.hpp"
#include "aspa/patch.hpp"

namespace aspa {

/// Terminal rule: unchanged when equal, otherwise the new value stands in
/// for the whole patch.
template <typename T>
ScalarPatch<T> diff_terminal(const T& old_value, const T& new_value) {
  if (old_value == new_value) return std::nullopt;
  return new_value;
}

/// Sequence rule: a shortest edit script over the longest common
/// subsequence, with deterministic delete-before-insert ordering in each
/// changed region.
template <typename T, typename ItemPatch = std::monostate, typename Eq = std::equal_to<T>>
SeqPatch<T, ItemPatch> diff_seq(const std::vector<T>& old_seq, const std::vector<T>& new_seq,
                                Eq eq = Eq{}) {
  SeqPatch<T, ItemPatch> patch;
  for (const EditOp& op : myers_ses(old_seq, new_seq, eq)) {
    typename SeqPatch<T, ItemPatch>::Op out;
    switch (op.kind) {
      case EditOp::Kind::Copy:
        out.kind = SeqOpKind::Copy;
        out.count = op.count;
        break;
      case EditOp::Kind::Delete:
        out.kind = SeqOpKind::Delete;
        out.count = op.count;
        break;
      case EditOp::Kind::Insert:
        out.kind = SeqOpKind::Insert;
        out.items.assign(new_seq.begin() + op.b_start, new_seq.begin() + op.b_start + op.count);
        break;
    }
    patch.ops.push_back(std::move(out));
  }
  return patch;
}

/// Keyed-set rule: members present only in the old set are removed by key,
/// members only in the new set are carried whole, and members under an
/// unchanged key whose content differs get a recursive child patch.
/// Definition-order moves produce nothing.
template <typename Member, typename Key, typename ChildPatch, typename EqFn, typename KeyFn,
          typename DiffFn>
SetPatch<Member, Key, ChildPatch> diff_set(const std::vector<Member>& old_set,
                                           const std::vector<Member>& new_set, EqFn member_equal,
                                           KeyFn key_fn, DiffFn diff_child) {
  SetPatch<Member, Key, ChildPatch> patch;
  auto old_view = detail::sorted_view(old_set);
  auto new_view = detail::sorted_view(new_set);
  std::size_t i = 0, j = 0;
  while (i < old_view.size() || j < new_view.size()) {
    if (j == new_view.size() ||
        (i < old_view.size() && key_less(*old_view[i], *new_view[j]))) {
      patch.removed.push_back(key_fn(*old_view[i]));
      ++i;
    } else if (i == old_view.size() || key_less(*new_view[j], *old_view[i])) {
      patch.added.push_back(*new_view[j]);
      ++j;
    } else {
      if (!member_equal(*old_view[i], *new_view[j]))
        patch.patched.emplace_back(key_fn(*old_view[i]), diff_child(*old_view[i], *new_view[j]));
      ++i;
      ++j;
    }
  }
  return patch;
}

namespace detail {

inline AttributePatch diff_attribute(const AttributeAst& old_attr, const AttributeAst& new_attr);

inline AttrSetPatch diff_attr_set(const std::vector<AttributeAst>& old_set,
                                  const std::vector<AttributeAst>& new_set) {
  return diff_set<AttributeAst, std::string, AttributePatch>(
      old_set, new_set, [](const AttributeAst& a, const AttributeAst& b) { return attr_equal(a, b); },
      [](const AttributeAst& a) { return a.name; },
      [](const AttributeAst& a, const AttributeAst& b) { return diff_attribute(a, b); });
}

inline HandlerPatch diff_handler(const ExceptionHandler& o, const ExceptionHandler& n) {
  HandlerPatch p;
  p.start = diff_terminal(o.start, n.start);
  p.end = diff_terminal(o.end, n.end);
  p.handler = diff_terminal(o.handler, n.handler);
  p.catch_type = diff_terminal(o.catch_type, n.catch_type);
  return p;
}

/// Exception-table rows are tuples, so an adjacent delete/insert of a single
/// row folds to an in-place row patch.
inline HandlerSeqPatch diff_handler_seq(const std::vector<ExceptionHandler>& old_seq,
                                        const std::vector<ExceptionHandler>& new_seq) {
  HandlerSeqPatch raw = diff_seq<ExceptionHandler, HandlerPatch>(old_seq, new_seq);
  HandlerSeqPatch fused;
  std::size_t old_pos = 0;
  for (std::size_t k = 0; k < raw.ops.size(); ++k) {
    auto& op = raw.ops[k];
    if (op.kind == SeqOpKind::Delete && op.count == 1 && k + 1 < raw.ops.size() &&
        raw.ops[k + 1].kind == SeqOpKind::Insert && raw.ops[k + 1].items.size() == 1) {
      HandlerSeqPatch::Op item;
      item.kind = SeqOpKind::PatchItem;
      item.item_patch = diff_handler(old_seq[old_pos], raw.ops[k + 1].items.front());
      fused.ops.push_back(std::move(item));
      old_pos += 1;
      ++k;  // consume the insert
      continue;
    }
    if (op.kind == SeqOpKind::Copy || op.kind == SeqOpKind::Delete) old_pos += op.count;
    fused.ops.push_back(std::move(op));
  }
  return fused;
}

inline CodePatch diff_code(const CodeAst& o, const CodeAst& n) {
  CodePatch p;
  p.instructions = diff_seq<Instruction>(o.instructions, n.instructions);
  p.max_stack = diff_terminal(o.max_stack, n.max_stack);
  p.max_locals = diff_terminal(o.max_locals, n.max_locals);
  p.handlers = diff_handler_seq(o.handlers, n.handlers);
  p.attributes = diff_attr_set(o.attributes, n.attributes);
  return p;
}

inline AttributePatch diff_attribute(const AttributeAst& old_attr, const AttributeAst& new_attr) {
  if (old_attr.content.index() != new_attr.content.index())
    throw error(errc::patch_mismatch,
                "attribute '" + old_attr.name + "' changes structured kind between versions");
  AttributePatch p;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, CodeAst>) {
          p.content = diff_code(o, std::get<CodeAst>(new_attr.content));
        } else if constexpr (std::is_same_v<T, ExceptionsAttr>) {
          p.content = diff_seq<std::string>(o.types, std::get<ExceptionsAttr>(new_attr.content).types);
        } else if constexpr (std::is_same_v<T, ConstantValueAttr>) {
          p.content = ScalarPatch<ConstantValue>(std::get<ConstantValueAttr>(new_attr.content).value);
        } else if constexpr (std::is_same_v<T, SourceFileAttr>) {
          p.content = ScalarPatch<std::string>(std::get<SourceFileAttr>(new_attr.content).file);
        } else if constexpr (std::is_same_v<T, SignatureAttr>) {
          p.content = ScalarPatch<std::string>(std::get<SignatureAttr>(new_attr.content).signature);
        } else if constexpr (std::is_same_v<T, InnerClassesAttr>) {
          p.content =
              diff_seq<InnerClassRow>(o.rows, std::get<InnerClassesAttr>(new_attr.content).rows);
        } else if constexpr (std::is_same_v<T, LineNumberTableAttr>) {
          p.content =
              diff_seq<LineEntry>(o.lines, std::get<LineNumberTableAttr>(new_attr.content).lines);
        } else if constexpr (std::is_same_v<T, StackMapTableAttr>) {
          p.content = diff_seq<StackMapFrame>(o.frames,
                                              std::get<StackMapTableAttr>(new_attr.content).frames);
        } else if constexpr (std::is_same_v<T, OpaqueAttr>) {
          p.content = ScalarPatch<Bytes>(std::get<OpaqueAttr>(new_attr.content).bytes);
        } else {
          // FlagAttr: same name and kind means equal; diff never reaches here.
          throw error(errc::patch_mismatch, "attribute '" + old_attr.name + "' cannot be patched");
        }
      },
      old_attr.content);
  return p;
}

inline FieldPatch diff_field(const FieldAst& o, const FieldAst& n) {
  FieldPatch p;
  p.type = diff_terminal(o.type, n.type);
  p.flags = diff_terminal(o.flags, n.flags);
  p.attributes = diff_attr_set(o.attributes, n.attributes);
  return p;
}

inline MethodPatch diff_method(const MethodAst& o, const MethodAst& n) {
  MethodPatch p;
  p.flags = diff_terminal(o.flags, n.flags);
  p.attributes = diff_attr_set(o.attributes, n.attributes);
  return p;
}

}  // namespace detail

/// fdiff: derives the tree-edit script between two class ASTs. The result
/// is unchanged() exactly when the inputs are canonical-equal, and applying
/// it to `old_class` reconstructs `new_class`.
inline ClassPatch diff_class(const ClassAst& old_class, const ClassAst& new_class) {
  ClassPatch p;
  p.class_type = diff_terminal(old_class.class_type, new_class.class_type);
  p.superclass = diff_terminal(old_class.superclass, new_class.superclass);
  p.interfaces = diff_set<std::string, std::string, NoChild>(
      old_class.interfaces, new_class.interfaces,
      [](const std::string& a, const std::string& b) { return a == b; },
      [](const std::string& s) { return s; },
      [](const std::string&, const std::string&) { return NoChild{}; });
  p.fields = diff_set<FieldAst, std::string, FieldPatch>(
      old_class.fields, new_class.fields,
      [](const FieldAst& a, const FieldAst& b) { return detail::field_equal(a, b); },
      [](const FieldAst& f) { return f.name; },
      [](const FieldAst& a, const FieldAst& b) { return detail::diff_field(a, b); });
  p.methods = diff_set<MethodAst, Signature, MethodPatch>(
      old_class.methods, new_class.methods,
      [](const MethodAst& a, const MethodAst& b) { return detail::method_equal(a, b); },
      [](const MethodAst& m) { return m.signature; },
      [](const MethodAst& a, const MethodAst& b) { return detail::diff_method(a, b); });
  p.constants = diff_set<ConstantValue, ConstantValue, NoChild>(
      old_class.constants, new_class.constants,
      [](const ConstantValue& a, const ConstantValue& b) { return a == b; },
      [](const ConstantValue& c) { return c; },
      [](const ConstantValue&, const ConstantValue&) { return NoChild{}; });
  p.attributes = detail::diff_attr_set(old_class.attributes, new_class.attributes);
  p.version = diff_terminal(old_class.version, new_class.version);
  p.flags = diff_terminal(old_class.flags, new_class.flags);
  return p;
}

// ---------------------------------------------------------------------------
// Patch application
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void apply_scalar(const ScalarPatch<T>& p, T& value) {
  if (p) value = *p;
}

/// Replays a sequence edit script against the old sequence. `apply_item`
/// handles PatchItem ops (absent for terminal-only sequences).
template <typename T, typename ItemPatch, typename ApplyItem>
std::vector<T> apply_seq(const SeqPatch<T, ItemPatch>& patch, const std::vector<T>& old_seq,
                         const std::string& path, ApplyItem apply_item) {
  if (patch.ops.empty()) return old_seq;  // normalized form of "unchanged"
  std::vector<T> out;
  std::size_t pos = 0;
  for (const auto& op : patch.ops) {
    switch (op.kind) {
      case SeqOpKind::Copy:
        if (pos + op.count > old_seq.size())
          throw patch_error(path, "copy of " + std::to_string(op.count) +
                                      " elements overruns the old sequence");
        out.insert(out.end(), old_seq.begin() + pos, old_seq.begin() + pos + op.count);
        pos += op.count;
        break;
      case SeqOpKind::Delete:
        if (pos + op.count > old_seq.size())
          throw patch_error(path, "delete of " + std::to_string(op.count) +
                                      " elements overruns the old sequence");
        pos += op.count;
        break;
      case SeqOpKind::Insert:
        out.insert(out.end(), op.items.begin(), op.items.end());
        break;
      case SeqOpKind::PatchItem:
        if (pos >= old_seq.size()) throw patch_error(path, "item patch overruns the old sequence");
        out.push_back(apply_item(op.item_patch, old_seq[pos]));
        ++pos;
        break;
    }
  }
  if (pos != old_seq.size())
    throw patch_error(path, "edit script covers " + std::to_string(pos) + " of " +
                                std::to_string(old_seq.size()) + " old elements");
  return out;
}

template <typename T, typename ItemPatch>
std::vector<T> apply_seq(const SeqPatch<T, ItemPatch>& patch, const std::vector<T>& old_seq,
                         const std::string& path) {
  return apply_seq(patch, old_seq, path,
                   [&path](const ItemPatch&, const T&) -> T {
                     throw patch_error(path, "sequence does not support item patches");
                   });
}

template <typename Member, typename Key, typename ChildPatch, typename KeyFn, typename KeyLessFn,
          typename ApplyChild, typename ShowKey>
std::vector<Member> apply_set(const SetPatch<Member, Key, ChildPatch>& patch,
                              const std::vector<Member>& old_set, const std::string& path,
                              KeyFn key_fn, KeyLessFn less, ApplyChild apply_child,
                              ShowKey show_key) {
  auto key_eq = [&less](const Key& a, const Key& b) { return !less(a, b) && !less(b, a); };
  auto old_view = sorted_view(old_set);
  std::vector<Member> out;
  out.reserve(old_set.size() + patch.added.size());

  std::size_t ri = 0, pi = 0;
  for (const auto* member : old_view) {
    const Key& k = key_fn(*member);
    if (ri < patch.removed.size() && less(patch.removed[ri], k))
      throw patch_error(path, "cannot remove missing member " + show_key(patch.removed[ri]));
    if (pi < patch.patched.size() && less(patch.patched[pi].first, k))
      throw patch_error(path, "cannot patch missing member " + show_key(patch.patched[pi].first));
    if (ri < patch.removed.size() && key_eq(patch.removed[ri], k)) {
      ++ri;
      continue;
    }
    if (pi < patch.patched.size() && key_eq(patch.patched[pi].first, k)) {
      out.push_back(apply_child(patch.patched[pi].second, *member));
      ++pi;
      continue;
    }
    out.push_back(*member);
  }
  if (ri < patch.removed.size())
    throw patch_error(path, "cannot remove missing member " + show_key(patch.removed[ri]));
  if (pi < patch.patched.size())
    throw patch_error(path, "cannot patch missing member " + show_key(patch.patched[pi].first));

  for (const auto& added : patch.added) {
    const Key& k = key_fn(added);
    bool exists = std::any_of(old_view.begin(), old_view.end(), [&](const Member* m) {
      return key_eq(key_fn(*m), k);
    });
    if (exists)
      throw patch_error(path, "cannot add member " + show_key(k) + ": key already present");
    out.push_back(added);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Member& x, const Member& y) { return key_less(x, y); });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (key_eq(key_fn(out[i - 1]), key_fn(out[i])))
      throw patch_error(path, "patch adds duplicate member " + show_key(key_fn(out[i])));
  return out;
}

inline AttributeAst apply_attribute(const AttributePatch& p, const AttributeAst& old_attr,
                                    const std::string& path);

inline std::vector<AttributeAst> apply_attr_set(const AttrSetPatch& patch,
                                                const std::vector<AttributeAst>& old_set,
                                                const std::string& path) {
  return apply_set(
      patch, old_set, path, [](const AttributeAst& a) -> const std::string& { return a.name; },
      [](const std::string& a, const std::string& b) { return a < b; },
      [&path](const AttributePatch& child, const AttributeAst& old_attr) {
        return apply_attribute(child, old_attr, path + "[" + old_attr.name + "]");
      },
      [](const std::string& k) { return "'" + k + "'"; });
}

inline ExceptionHandler apply_handler(const HandlerPatch& p, const ExceptionHandler& old_handler) {
  ExceptionHandler out = old_handler;
  apply_scalar(p.start, out.start);
  apply_scalar(p.end, out.end);
  apply_scalar(p.handler, out.handler);
  apply_scalar(p.catch_type, out.catch_type);
  return out;
}

inline CodeAst apply_code(const CodePatch& p, const CodeAst& old_code, const std::string& path) {
  CodeAst out;
  out.max_stack = old_code.max_stack;
  out.max_locals = old_code.max_locals;
  apply_scalar(p.max_stack, out.max_stack);
  apply_scalar(p.max_locals, out.max_locals);
  out.instructions = apply_seq(p.instructions, old_code.instructions, path + ".instructions");
  out.handlers = apply_seq(p.handlers, old_code.handlers, path + ".handlers",
                           [](const HandlerPatch& hp, const ExceptionHandler& oh) {
                             return apply_handler(hp, oh);
                           });
  out.attributes = apply_attr_set(p.attributes, old_code.attributes, path + ".attributes");
  return out;
}

inline AttributeAst apply_attribute(const AttributePatch& p, const AttributeAst& old_attr,
                                    const std::string& path) {
  AttributeAst out;
  out.name = old_attr.name;
  bool shape_ok = true;
  std::visit(
      [&](const auto& patch_content) {
        using P = std::decay_t<decltype(patch_content)>;
        if constexpr (std::is_same_v<P, CodePatch>) {
          const auto* old_code = std::get_if<CodeAst>(&old_attr.content);
          if (!old_code) { shape_ok = false; return; }
          out.content = apply_code(patch_content, *old_code, path);
        } else if constexpr (std::is_same_v<P, StringSeqPatch>) {
          const auto* old_exc = std::get_if<ExceptionsAttr>(&old_attr.content);
          if (!old_exc) { shape_ok = false; return; }
          out.content = ExceptionsAttr{apply_seq(patch_content, old_exc->types, path)};
        } else if constexpr (std::is_same_v<P, ScalarPatch<ConstantValue>>) {
          const auto* old_cv = std::get_if<ConstantValueAttr>(&old_attr.content);
          if (!old_cv) { shape_ok = false; return; }
          ConstantValueAttr next = *old_cv;
          apply_scalar(patch_content, next.value);
          out.content = std::move(next);
        } else if constexpr (std::is_same_v<P, ScalarPatch<std::string>>) {
          if (const auto* sf = std::get_if<SourceFileAttr>(&old_attr.content)) {
            SourceFileAttr next = *sf;
            apply_scalar(patch_content, next.file);
            out.content = std::move(next);
          } else if (const auto* sig = std::get_if<SignatureAttr>(&old_attr.content)) {
            SignatureAttr next = *sig;
            apply_scalar(patch_content, next.signature);
            out.content = std::move(next);
          } else {
            shape_ok = false;
          }
        } else if constexpr (std::is_same_v<P, InnerClassSeqPatch>) {
          const auto* old_ic = std::get_if<InnerClassesAttr>(&old_attr.content);
          if (!old_ic) { shape_ok = false; return; }
          out.content = InnerClassesAttr{apply_seq(patch_content, old_ic->rows, path)};
        } else if constexpr (std::is_same_v<P, LineSeqPatch>) {
          const auto* old_lnt = std::get_if<LineNumberTableAttr>(&old_attr.content);
          if (!old_lnt) { shape_ok = false; return; }
          out.content = LineNumberTableAttr{apply_seq(patch_content, old_lnt->lines, path)};
        } else if constexpr (std::is_same_v<P, FrameSeqPatch>) {
          const auto* old_smt = std::get_if<StackMapTableAttr>(&old_attr.content);
          if (!old_smt) { shape_ok = false; return; }
          out.content = StackMapTableAttr{apply_seq(patch_content, old_smt->frames, path)};
        } else if constexpr (std::is_same_v<P, ScalarPatch<Bytes>>) {
          const auto* old_opaque = std::get_if<OpaqueAttr>(&old_attr.content);
          if (!old_opaque) { shape_ok = false; return; }
          OpaqueAttr next = *old_opaque;
          apply_scalar(patch_content, next.bytes);
          out.content = std::move(next);
        }
      },
      p.content);
  if (!shape_ok)
    throw patch_error(path, "patch shape does not match the old attribute's structured kind");
  return out;
}

inline FieldAst apply_field(const FieldPatch& p, const FieldAst& old_field, const std::string& path) {
  FieldAst out = old_field;
  apply_scalar(p.type, out.type);
  apply_scalar(p.flags, out.flags);
  out.attributes = apply_attr_set(p.attributes, old_field.attributes, path + ".attributes");
  return out;
}

inline MethodAst apply_method(const MethodPatch& p, const MethodAst& old_method,
                              const std::string& path) {
  MethodAst out = old_method;
  apply_scalar(p.flags, out.flags);
  out.attributes = apply_attr_set(p.attributes, old_method.attributes, path + ".attributes");
  return out;
}

}  // namespace detail

namespace detail {

/// Membership pre-pass over one keyed set: `phase` 0 verifies removals and
/// in-place patches target existing keys, phase 1 verifies additions target
/// absent keys. Running phase 0 over the whole class before any phase 1
/// check makes "expected member is missing" the primary wrong-base
/// diagnostic.
template <typename Member, typename Key, typename ChildPatch, typename KeyFn, typename KeyLessFn,
          typename ShowKey>
void precheck_set(const SetPatch<Member, Key, ChildPatch>& patch,
                  const std::vector<Member>& old_set, int phase, const std::string& path,
                  KeyFn key_fn, KeyLessFn less, ShowKey show_key) {
  auto old_view = sorted_view(old_set);
  auto contains = [&](const Key& k) {
    return std::any_of(old_view.begin(), old_view.end(), [&](const Member* m) {
      const Key& ok = key_fn(*m);
      return !less(ok, k) && !less(k, ok);
    });
  };
  if (phase == 0) {
    for (const auto& k : patch.removed)
      if (!contains(k))
        throw patch_error(path, "cannot remove missing member " + show_key(k));
    for (const auto& [k, child] : patch.patched)
      if (!contains(k))
        throw patch_error(path, "cannot patch missing member " + show_key(k));
  } else {
    for (const auto& added : patch.added)
      if (contains(key_fn(added)))
        throw patch_error(path,
                          "cannot add member " + show_key(key_fn(added)) + ": key already present");
  }
}

}  // namespace detail

/// Applies a class patch: A_new = p(A_old). Structural mismatches between
/// the patch and the old tree raise patch_error naming the offending path;
/// afterwards the constant closure is re-checked against the patched
/// constant set.
inline ClassAst apply_patch(const ClassPatch& p, const ClassAst& old_class) {
  using namespace detail;

  auto string_self = [](const std::string& s) -> const std::string& { return s; };
  auto string_less = [](const std::string& a, const std::string& b) { return a < b; };
  auto quote = [](const std::string& k) { return "'" + k + "'"; };
  auto field_key = [](const FieldAst& f) -> const std::string& { return f.name; };
  auto method_key = [](const MethodAst& m) -> const Signature& { return m.signature; };
  auto sig_less = [](const Signature& a, const Signature& b) { return signature_less(a, b); };
  auto sig_show = [](const Signature& k) { return k.pretty(); };
  auto const_self = [](const ConstantValue& c) -> const ConstantValue& { return c; };
  auto const_less = [](const ConstantValue& a, const ConstantValue& b) { return a < b; };
  auto const_show = [](const ConstantValue& k) { return k.pretty(); };
  auto attr_key = [](const AttributeAst& a) -> const std::string& { return a.name; };
  for (int phase = 0; phase < 2; ++phase) {
    precheck_set(p.interfaces, old_class.interfaces, phase, "interfaces", string_self, string_less,
                 quote);
    precheck_set(p.fields, old_class.fields, phase, "fields", field_key, string_less, quote);
    precheck_set(p.methods, old_class.methods, phase, "methods", method_key, sig_less, sig_show);
    precheck_set(p.constants, old_class.constants, phase, "constants", const_self, const_less,
                 const_show);
    precheck_set(p.attributes, old_class.attributes, phase, "attributes", attr_key, string_less,
                 quote);
  }

  ClassAst out = old_class;
  apply_scalar(p.class_type, out.class_type);
  apply_scalar(p.superclass, out.superclass);
  apply_scalar(p.version, out.version);
  apply_scalar(p.flags, out.flags);
  out.interfaces = apply_set(
      p.interfaces, old_class.interfaces, "interfaces",
      [](const std::string& s) -> const std::string& { return s; },
      [](const std::string& a, const std::string& b) { return a < b; },
      [](const NoChild&, const std::string& s) { return s; },
      [](const std::string& k) { return "'" + k + "'"; });
  out.fields = apply_set(
      p.fields, old_class.fields, "fields",
      [](const FieldAst& f) -> const std::string& { return f.name; },
      [](const std::string& a, const std::string& b) { return a < b; },
      [](const FieldPatch& child, const FieldAst& old_field) {
        return apply_field(child, old_field, "fields[" + old_field.name + "]");
      },
      [](const std::string& k) { return "'" + k + "'"; });
  out.methods = apply_set(
      p.methods, old_class.methods, "methods",
      [](const MethodAst& m) -> const Signature& { return m.signature; },
      [](const Signature& a, const Signature& b) { return signature_less(a, b); },
      [](const MethodPatch& child, const MethodAst& old_method) {
        return apply_method(child, old_method, "methods[" + old_method.signature.pretty() + "]");
      },
      [](const Signature& k) { return k.pretty(); });
  out.constants = apply_set(
      p.constants, old_class.constants, "constants",
      [](const ConstantValue& c) -> const ConstantValue& { return c; },
      [](const ConstantValue& a, const ConstantValue& b) { return a < b; },
      [](const NoChild&, const ConstantValue& c) { return c; },
      [](const ConstantValue& k) { return k.pretty(); });
  out.attributes = apply_attr_set(p.attributes, old_class.attributes, "attributes");

  // The patched constant set must still cover everything the class refers to.
  std::set<ConstantValue> declared(out.constants.begin(), out.constants.end());
  for (const auto& needed : required_constants(out))
    if (!declared.count(needed))
      throw patch_error("constants",
                        "patched constant set is missing " + needed.pretty() +
                            " required by the class body");
  return out;
}

}  // namespace aspa

#endif  // ASPA_DIFF_HPP
