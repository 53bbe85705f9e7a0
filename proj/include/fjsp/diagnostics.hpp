#pragma once

#include <string>
#include <vector>

namespace fjsp {

// Constraint families of the scheduling model. OneStart covers the
// processing constraint (each operation runs exactly once, on an eligible
// machine), Precedence the in-job operation order, Overlap machine
// exclusivity, Window admissible start times.
enum class ConstraintKind { OneStart, Precedence, Overlap, Window };

struct Diagnostic {
    ConstraintKind kind;
    std::string detail;
};

const char* constraint_kind_name(ConstraintKind kind);

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

}  // namespace fjsp
