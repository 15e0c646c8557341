#ifndef ASPA_ASPA_HPP
#define ASPA_ASPA_HPP

// Umbrella header: the full diff/patch pipeline for JVM class files and
// JAR-like archives.

#include "aspa/archive.hpp"
#include "aspa/ast.hpp"
#include "aspa/classfile_read.hpp"
#include "aspa/classfile_write.hpp"
#include "aspa/diff.hpp"
#include "aspa/patch.hpp"
#include "aspa/patch_dump.hpp"
#include "aspa/patch_io.hpp"
#include "aspa/pool.hpp"
#include "aspa/zip.hpp"

#endif  // ASPA_ASPA_HPP
