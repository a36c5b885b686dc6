#pragma once

#include <dtm/problem.hpp>

#include <filesystem>
#include <string_view>

namespace dtm {

/// Line-oriented problem description:
///
///   # comment
///   order = 2
///   vars = u1, u2
///   delay a = constant(1) | proportional(1/2) | vary(exp(-t)/2)
///   eq u1'' = <expr>
///   init u1 = [0, 0]
///   phi u1 = <expr in t>
///   horizon = 1
///   taylor_order = 10
///
/// Syntax errors raise ParseError with the 1-based line and column; missing or
/// duplicated declarations raise ValidationError. The result is not run
/// through validate().
CauchyProblem parse_problem(std::string_view text);

CauchyProblem load_problem(const std::filesystem::path& path);

} // namespace dtm
