#ifndef ASPA_ARCHIVE_HPP
#define ASPA_ARCHIVE_HPP

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aspa/ast.hpp"
#include "aspa/classfile_read.hpp"
#include "aspa/classfile_write.hpp"
#include "aspa/diff.hpp"
#include "aspa/parallel.hpp"
#include "aspa/patch.hpp"
#include "aspa/zip.hpp"

namespace aspa {

/// An archive reduced to content: classes by declared name, everything else
/// by entry path. Container metadata never makes it this far.
struct ArchiveContents {
  std::map<std::string, ClassAst> classes;
  std::map<std::string, Bytes> resources;

  bool empty() const { return classes.empty() && resources.empty(); }
};

namespace detail {

inline bool is_signature_entry(std::string_view name) {
  if (!name.starts_with("META-INF/")) return false;
  auto dot = name.rfind('.');
  if (dot == std::string_view::npos) return false;
  std::string_view ext = name.substr(dot + 1);
  return ext == "SF" || ext == "RSA" || ext == "DSA" || ext == "EC";
}

}  // namespace detail

/// Reads a JAR-like archive: class entries are parsed to ASTs keyed by their
/// declared class name (which must agree with the entry path), remaining
/// entries are carried as bytes. Signed and multi-release archives are
/// rejected outright since neither survives re-serialization.
inline ArchiveContents read_archive(std::span<const std::uint8_t> data, unsigned threads = 0) {
  std::vector<ZipEntry> entries = read_zip(data);

  std::set<std::string_view> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.name).second)
      throw archive_error(errc::duplicate_entry, e.name, "entry appears more than once");
    if (e.name.starts_with("META-INF/versions/"))
      throw archive_error(errc::unsupported_archive, e.name,
                          "multi-release archives cannot be re-serialized");
    if (detail::is_signature_entry(e.name))
      throw archive_error(errc::unsupported_archive, e.name,
                          "signed archives cannot be re-serialized");
  }

  std::vector<const ZipEntry*> class_entries;
  ArchiveContents out;
  for (const auto& e : entries) {
    if (e.name.ends_with(".class")) class_entries.push_back(&e);
    else out.resources.emplace(e.name, e.data);
  }

  std::vector<ClassAst> parsed(class_entries.size());
  parallel_for(class_entries.size(), threads, [&](std::size_t i) {
    const ZipEntry& e = *class_entries[i];
    try {
      parsed[i] = parse_class(std::span<const std::uint8_t>(e.data.data(), e.data.size()));
    } catch (const error& err) {
      throw archive_error(errc::class_parse_error, e.name, err.what());
    }
  });
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const std::string& entry_name = class_entries[i]->name;
    std::string expected = parsed[i].class_type + ".class";
    if (entry_name != expected)
      throw archive_error(errc::entry_class_mismatch, entry_name,
                          "entry declares class " + parsed[i].class_type);
    out.classes.emplace(parsed[i].class_type, std::move(parsed[i]));
  }
  return out;
}

inline ArchiveContents read_archive(const Bytes& data, unsigned threads = 0) {
  return read_archive(std::span<const std::uint8_t>(data.data(), data.size()), threads);
}

/// Deterministic inverse of read_archive: classes re-emitted under
/// `<name>.class`, entries sorted by name, fixed timestamps.
inline Bytes write_archive(const ArchiveContents& contents, unsigned threads = 0) {
  std::vector<const std::pair<const std::string, ClassAst>*> classes;
  classes.reserve(contents.classes.size());
  for (const auto& kv : contents.classes) classes.push_back(&kv);

  std::vector<ZipEntry> entries(classes.size());
  parallel_for(classes.size(), threads, [&](std::size_t i) {
    entries[i].name = classes[i]->first + ".class";
    entries[i].data = emit_class(classes[i]->second);
  });
  for (const auto& [name, bytes] : contents.resources) entries.push_back(ZipEntry{name, bytes});
  return write_zip(std::move(entries));
}

/// Archive-level difference: one patch covering every class and resource.
/// Classes compare at the AST level, resources byte-wise.
inline ArchivePatch diff_archive(const ArchiveContents& old_archive,
                                 const ArchiveContents& new_archive, unsigned threads = 0) {
  ArchivePatch patch;

  struct Pair {
    const std::string* name;
    const ClassAst* old_ast;
    const ClassAst* new_ast;
  };
  std::vector<Pair> common;
  for (const auto& [name, old_ast] : old_archive.classes) {
    auto it = new_archive.classes.find(name);
    if (it == new_archive.classes.end()) patch.removed.insert(name);
    else common.push_back(Pair{&name, &old_ast, &it->second});
  }
  for (const auto& [name, new_ast] : new_archive.classes)
    if (!old_archive.classes.count(name)) patch.added.emplace(name, new_ast);

  std::vector<ClassPatch> diffs(common.size());
  parallel_for(common.size(), threads,
               [&](std::size_t i) { diffs[i] = diff_class(*common[i].old_ast, *common[i].new_ast); });
  for (std::size_t i = 0; i < common.size(); ++i)
    if (!diffs[i].unchanged()) patch.patched.emplace(*common[i].name, std::move(diffs[i]));

  for (const auto& [name, bytes] : old_archive.resources) {
    auto it = new_archive.resources.find(name);
    if (it == new_archive.resources.end())
      patch.other_entries.emplace(
          name, ArchivePatch::ResourceDelta{ArchivePatch::ResourceDelta::Kind::Removed, {}});
    else if (it->second != bytes)
      patch.other_entries.emplace(
          name, ArchivePatch::ResourceDelta{ArchivePatch::ResourceDelta::Kind::Replaced, it->second});
  }
  for (const auto& [name, bytes] : new_archive.resources)
    if (!old_archive.resources.count(name))
      patch.other_entries.emplace(
          name, ArchivePatch::ResourceDelta{ArchivePatch::ResourceDelta::Kind::Added, bytes});
  return patch;
}

/// Applies an archive patch: every removed or patched name must exist in the
/// old archive, every added name must not.
inline ArchiveContents apply_archive_patch(const ArchivePatch& patch,
                                           const ArchiveContents& old_archive,
                                           unsigned threads = 0) {
  ArchiveContents out;
  out.resources = old_archive.resources;

  for (const auto& name : patch.removed)
    if (!old_archive.classes.count(name))
      throw patch_error(name, "patch removes a class the archive does not contain");
  for (const auto& [name, ast] : patch.added)
    if (old_archive.classes.count(name))
      throw patch_error(name, "patch adds a class the archive already contains");

  struct Job {
    const std::string* name;
    const ClassPatch* patch;
    const ClassAst* old_ast;
  };
  std::vector<Job> jobs;
  for (const auto& [name, cp] : patch.patched) {
    auto it = old_archive.classes.find(name);
    if (it == old_archive.classes.end())
      throw patch_error(name, "patch modifies a class the archive does not contain");
    jobs.push_back(Job{&name, &cp, &it->second});
  }
  std::vector<ClassAst> patched(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    try {
      patched[i] = apply_patch(*jobs[i].patch, *jobs[i].old_ast);
    } catch (const patch_error& e) {
      throw patch_error(*jobs[i].name, e.what());
    }
  });

  for (const auto& [name, old_ast] : old_archive.classes) {
    if (patch.removed.count(name) || patch.patched.count(name)) continue;
    out.classes.emplace(name, old_ast);
  }
  for (std::size_t i = 0; i < jobs.size(); ++i)
    out.classes.emplace(*jobs[i].name, std::move(patched[i]));
  for (const auto& [name, ast] : patch.added) out.classes.emplace(name, ast);

  for (const auto& [name, delta] : patch.other_entries) {
    switch (delta.kind) {
      case ArchivePatch::ResourceDelta::Kind::Added:
        if (out.resources.count(name))
          throw patch_error(name, "patch adds a resource the archive already contains");
        out.resources.emplace(name, delta.bytes);
        break;
      case ArchivePatch::ResourceDelta::Kind::Removed:
        if (out.resources.erase(name) == 0)
          throw patch_error(name, "patch removes a resource the archive does not contain");
        break;
      case ArchivePatch::ResourceDelta::Kind::Replaced: {
        auto it = out.resources.find(name);
        if (it == out.resources.end())
          throw patch_error(name, "patch replaces a resource the archive does not contain");
        it->second = delta.bytes;
        break;
      }
    }
  }
  return out;
}

}  // namespace aspa

#endif  // ASPA_ARCHIVE_HPP
