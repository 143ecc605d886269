#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stcsp/core_model.hpp"

namespace stcsp {

struct ModelSource {
    std::string text;
    std::string origin = "<inline>";  // file path or "<inline>"

    static ModelSource from_file(const std::string& path);
};

struct ParseDiagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string message;
    int line = 0;
    int column = 0;

    [[nodiscard]] std::string format(const std::string& origin) const;
};

struct ParseResult {
    std::optional<StCsp> model;  // absent whenever an error was reported
    std::vector<ParseDiagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return model.has_value(); }
};

/// Parses the `.stcsp` modelling language:
///
///     var x, y with alphabet [1..3];
///     first x == 1;
///     (next x eq 2) -> (x eq 1);
///     1 until (x eq 3);
ParseResult parse(const ModelSource& src);

/// Convenience wrapper: throws std::runtime_error carrying all diagnostics.
StCsp parse_or_throw(const ModelSource& src);

using VarNamer = std::function<std::string(VarId)>;

std::string unparse(const Expr& e, const VarNamer& name);
std::string unparse(const Constraint& c, const VarNamer& name);

/// Emits declarations (grouped by consecutive equal alphabets) then constraints.
/// parse(unparse(p)) is structurally identical to p for parser-produced models.
std::string unparse(const StCsp& p);

}  // namespace stcsp
