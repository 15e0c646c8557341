#ifndef ASPA_ERROR_HPP
#define ASPA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aspa {

/// Error categories raised across the library. Values are stable; the CLI
/// maps them onto exit codes.
enum class errc {
  // class-file parsing
  malformed_magic,
  truncated_input,
  unsupported_version,
  bad_pool_reference,
  unknown_opcode,
  bad_branch_target,
  truncated_code,
  malformed_descriptor,
  malformed_attribute,
  // class-file emission
  capacity_overflow,
  unresolved_label,
  unresolved_constant,
  code_length_overflow,
  branch_offset_overflow,
  attribute_not_relocatable,
  // patch application
  patch_mismatch,
  // patch file format
  bad_magic,
  unsupported_format_version,
  unknown_node_tag,
  truncated_patch,
  bad_varint,
  // archives
  bad_zip_container,
  duplicate_entry,
  entry_class_mismatch,
  unsupported_archive,
  class_parse_error,
  // tooling
  io_error,
  usage_error,
};

inline const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::malformed_magic: return "malformed-magic";
    case errc::truncated_input: return "truncated-input";
    case errc::unsupported_version: return "unsupported-version";
    case errc::bad_pool_reference: return "bad-pool-reference";
    case errc::unknown_opcode: return "unknown-opcode";
    case errc::bad_branch_target: return "bad-branch-target";
    case errc::truncated_code: return "truncated-code";
    case errc::malformed_descriptor: return "malformed-descriptor";
    case errc::malformed_attribute: return "malformed-attribute";
    case errc::capacity_overflow: return "capacity-overflow";
    case errc::unresolved_label: return "unresolved-label";
    case errc::unresolved_constant: return "unresolved-constant";
    case errc::code_length_overflow: return "code-length-overflow";
    case errc::branch_offset_overflow: return "branch-offset-overflow";
    case errc::attribute_not_relocatable: return "attribute-not-relocatable";
    case errc::patch_mismatch: return "patch-mismatch";
    case errc::bad_magic: return "bad-magic";
    case errc::unsupported_format_version: return "unsupported-format-version";
    case errc::unknown_node_tag: return "unknown-node-tag";
    case errc::truncated_patch: return "truncated-patch";
    case errc::bad_varint: return "bad-varint";
    case errc::bad_zip_container: return "bad-zip-container";
    case errc::duplicate_entry: return "duplicate-entry";
    case errc::entry_class_mismatch: return "entry-class-mismatch";
    case errc::unsupported_archive: return "unsupported-archive";
    case errc::class_parse_error: return "class-parse-error";
    case errc::io_error: return "io-error";
    case errc::usage_error: return "usage-error";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

/// Raised while decoding class files or patch files; carries the byte offset
/// of the offending datum.
class parse_error : public error {
 public:
  parse_error(errc code, std::size_t offset, const std::string& message)
      : error(code, message + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised while emitting class files or encoding patches.
class emit_error : public error {
 public:
  using error::error;
};

/// Raised when a patch does not fit the tree it is applied to; carries the
/// AST path of the mismatch.
class patch_error : public error {
 public:
  patch_error(const std::string& path, const std::string& message)
      : error(errc::patch_mismatch, message + " [at " + path + "]"), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Raised by archive reading/writing; carries the entry name when known.
class archive_error : public error {
 public:
  archive_error(errc code, const std::string& entry, const std::string& message)
      : error(code, entry.empty() ? message : entry + ": " + message), entry_(entry) {}

  const std::string& entry() const noexcept { return entry_; }

 private:
  std::string entry_;
};

}  // namespace aspa

#endif  // ASPA_ERROR_HPP
