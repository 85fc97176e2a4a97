#pragma once

#include "plmm/nesting.hpp"

#include <string>

namespace plmm {

/// On-disk problem description. The JSON schema is versioned ("1"); parsing
/// is strict: unknown keys and type mismatches are parse errors reported
/// with a JSON-pointer-style path, syntax errors with line and column.
struct ProblemSpecFile {
    Vec3 spacing{1.0, 1.0, 1.0};
    std::uint64_t seed = 0;
    NestingNode root;
    TransformChain chain{};

    void set_spacing(const Vec3& s) {
        spacing = s;
        root.primitive.spacing = s;
    }
};

ProblemSpecFile parse_spec(const std::string& text);

/// Read and parse; missing or unreadable files raise IoError.
ProblemSpecFile load_spec_file(const std::string& path);

/// Canonical form: every default materialised, keys in alphabetical order,
/// two-space indent, trailing newline. parse(canonical(x)) == x and
/// canonical(parse(canonical(x))) is byte-identical.
std::string canonical_spec(const ProblemSpecFile& spec);

/// Compose the problem the spec describes (normalises the root spacing from
/// the top-level field first).
Problem build_problem(ProblemSpecFile& spec);

} // namespace plmm
