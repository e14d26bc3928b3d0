#pragma once

#include "wlsc/functional.hpp"
#include "wlsc/minimize.hpp"
#include "wlsc/qslb_check.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wlsc {

/// Profile phi supported in the closed unit ball, with analytic gradient.
struct Profile {
  std::string name = "zero";
  int components = 1;
  std::function<Vector(const Point&)> value;
  std::function<Matrix(const Point&)> gradient;  // components x dim
};

namespace profiles {
/// max(0, 1 - |y|)
Profile hat(int dim);
/// (1 - |y|^2)^2 on |y| < 1
Profile bump(int dim);
/// (1 - |y|^2)(1 + y_1 / 2) on |y| < 1: not even, phi(0) = 1
Profile skew(int dim);
Profile zero(int dim);
Profile get(const std::string& name, int dim);
}  // namespace profiles

enum class SequenceKind {
  BoundaryRescale,            // k^{N-1} phi(k (x - x0))
  JumpMigration,              // chi_(0, 1/n)
  PureBoundaryConcentration,  // boundary layer of width 1/n, unit total variation
  FixedTraceOscillation,      // zero-trace triangle-wave laminate of frequency n
  RescaledWitness,            // v(n (x - x0)) / ||v(n (. - x0))||_{W^{1,1}}
};

std::string to_string(SequenceKind k);
SequenceKind sequence_kind(const std::string& name);

struct SequenceSpec {
  SequenceKind kind = SequenceKind::JumpMigration;
  Domain domain = Domain::interval(0.0, 1.0);
  int components = 1;
  int n_min = 1;
  int n_max = 64;
  double h = 0.125;     // base mesh size
  int resolution = 16;  // cells per 1/n length scale (capped by the mesh budget)
  // BoundaryRescale / RescaledWitness
  Profile profile = profiles::hat(1);
  BoundaryPoint x0{};
  // FixedTraceOscillation
  Vector amplitude = Vector::Ones(1);
  Point direction = Point(1.0, 0.0);
  // RescaledWitness: witness on the canonical half-ball mesh in the frame of x0.normal
  std::optional<TestField> witness;
};

/// Members live on a mesh of the whole domain, except RescaledWitness members,
/// which live on the mapped half-ball mesh x0 + D/n (zero elsewhere).
BVFunction generate(const SequenceSpec& spec, int n);
/// Whether members of this kind cover the whole domain.
bool covers_domain(const SequenceSpec& spec);

/// n values used by the liminf estimator: n_min..n_max in powers of two plus n_max.
std::vector<int> index_grid(int n_min, int n_max);

struct LiminfRow {
  int n = 0;
  double energy = 0.0;       // F(u_n)
  double gap = 0.0;          // F(u_n) - F(0)
  double running_min = 0.0;  // min_{m >= n} F(u_m) over the table
};

struct LiminfReport {
  std::vector<LiminfRow> rows;
  double limit_energy = 0.0;  // F(0)
  double tail_min = 0.0;
  double tail_max = 0.0;
  double tol = 0.0;
  bool violated = false;      // every tail member lies below F(0) - tol
};

/// Empirical liminf of F along the sequence towards the weak* limit 0.  The
/// tail is the second half of the index table.
LiminfReport empirical_liminf(const Integrand& f, const RecessionFn& finf, const SequenceSpec& spec,
                              const std::vector<int>& ns, double tol = 1e-6);

struct LimitEnergyRow {
  int k = 0;
  double energy = 0.0;  // F(phi_k)
};

struct LimitEnergyReport {
  std::vector<LimitEnergyRow> rows;
  double halfball_integral = 0.0;  // int_{B_1 cap {nu . y < 0}} f(grad phi)
  double relative_gap = 0.0;       // at the largest k
};

/// Compares F(phi_k) with the half-ball integral of the profile.  f must be
/// x-free and positively 1-homogeneous; x0 must sit on a flat boundary piece.
LimitEnergyReport limit_energy_check(const Integrand& f, const RecessionFn& finf, const Profile& profile,
                                     const Domain& domain, const BoundaryPoint& x0, const std::vector<int>& ks,
                                     int resolution = 16);

/// Independent quadrature of int_{D_nu} f(grad phi(y)) dy.
double halfball_profile_integral(const Integrand& f, const Profile& profile, int dim, const Point& normal);

struct NecessityRow {
  int n = 0;
  double gap = 0.0;        // F(u_n) - F(0)
  double w11_norm = 0.0;   // ||u_n||_{W^{1,1}}, 1 by construction
};

struct NecessityCertificate {
  SequenceSpec spec;
  std::vector<NecessityRow> rows;
  double eps = 0.0;
  double bound = 0.0;      // -eps/2 + tol
  double liminf = 0.0;     // min over the second half of the table
  bool certified = false;
};

/// Rescales a half-ball witness of a qslb violation into B_{1/n}(x0) cap Omega,
/// normalizes in W^{1,1} and checks liminf F(u_n) <= F(0) - eps/2 + tol.
/// Throws when no violation was reported and "witness not transferable" when
/// the rescaled energies stay above the bound.
NecessityCertificate necessity_witness(const Integrand& f, const RecessionFn& finf, const Domain& domain,
                                       const QslbReport& report, double eps, const std::vector<int>& ns,
                                       double tol = 1e-6);

}  // namespace wlsc
