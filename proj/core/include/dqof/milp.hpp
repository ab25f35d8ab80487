#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dqof/hubo.hpp"

namespace dqof {

/// Linear model over binary variables. Variables 0..original_size-1 are the
/// x_i; one y per quadratic term and one z per cubic term follow, in term
/// order.
struct MilpModel {
  struct Entry {
    std::size_t var;
    double coeff;
  };
  struct Constraint {
    enum class Sense { kLessEqual, kGreaterEqual };
    std::string name;
    std::vector<Entry> terms;
    Sense sense;
    double rhs;
  };

  std::size_t original_size = 0;
  std::vector<std::string> names;
  std::vector<Entry> objective;
  std::vector<Constraint> constraints;

  std::size_t variable_count() const noexcept { return names.size(); }
};

/// Standard product linearization: y <= x_i, y <= x_j, y >= x_i + x_j - 1
/// for each quadratic term; z <= x_i, x_j, x_r and z >= x_i + x_j + x_r - 2
/// for each cubic term. Objective: h on x, J on y, K on z.
MilpModel linearize_to_milp(const HuboProblem& hubo);

/// Values of every model variable implied by an assignment of the x_i.
std::vector<double> implied_values(const HuboProblem& hubo, const MilpModel& model,
                                   std::span<const std::uint8_t> x);
double milp_objective(const MilpModel& model, std::span<const double> values);
bool milp_feasible(const MilpModel& model, std::span<const double> values, double tol = 1e-9);

/// CPLEX LP text: Minimize / Subject To / Binary / End.
void write_lp(std::ostream& out, const MilpModel& model);
void write_lp(const std::filesystem::path& path, const MilpModel& model);

/// Name of the environment variable pointing at an external MILP solver.
inline constexpr const char* kMilpSolverEnv = "DQOF_MILP_SOLVER";

/// Runs `<solver> <lp_path>` and returns the first number following the word
/// "objective" (case-insensitive) in its standard output. Empty when the
/// environment variable is unset. Throws std::runtime_error when the solver
/// fails or prints no objective.
std::optional<double> solve_with_external(const std::filesystem::path& lp_path);

/// Extracts the objective from solver output; exposed for testing.
std::optional<double> parse_solver_objective(const std::string& output);

}  // namespace dqof
