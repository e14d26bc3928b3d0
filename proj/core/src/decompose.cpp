#include "wlsc/decompose.hpp"

#include "wlsc/sequences.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <limits>
#include <optional>
#include <tuple>

namespace wlsc {

namespace {

constexpr double kCoverTol = 1e-12;
constexpr double kZero = 1e-14;

// int_0^len |v0 + (v1 - v0) t / len| for vector data; exact for scalars.
double abs_affine(const Vector& v0, const Vector& v1, double len) {
  if (v0.size() == 1) {
    const double a = v0(0), b = v1(0);
    if (a * b >= 0) return 0.5 * len * (std::abs(a) + std::abs(b));
    return 0.5 * len * (a * a + b * b) / (std::abs(a) + std::abs(b));
  }
  // 5-point Gauss-Legendre on [0, 1].
  static constexpr std::array<double, 5> x{0.0469100770306680, 0.2307653449471585, 0.5, 0.7692346550528415,
                                           0.9530899229693320};
  static constexpr std::array<double, 5> w{0.1184634425280945, 0.2393143352496832, 0.2844444444444444,
                                           0.2393143352496832, 0.1184634425280945};
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += w[i] * ((1 - x[i]) * v0 + x[i] * v1).norm();
  return s * len;
}

std::vector<double> cutoff_values(const Mesh& mesh, const CompactSet& k, int n, double sharpness) {
  std::vector<double> phi(mesh.num_vertices());
  for (std::size_t v = 0; v < phi.size(); ++v) {
    const double d = k.distance(mesh.vertex(static_cast<int>(v)));
    phi[v] = std::clamp(sharpness - sharpness * n * d, 0.0, 1.0);
  }
  return phi;
}

double cutoff_gradient(const Mesh& mesh, std::size_t c, const std::vector<double>& phi) {
  Point g = Point::Zero();
  const auto cv = mesh.cell(c);
  for (int i = 0; i < mesh.cell_size(); ++i)
    g += phi[static_cast<std::size_t>(cv[static_cast<std::size_t>(i)])] * mesh.basis_gradient(c, i);
  return g.norm();
}

double coupling(const BVFunction& r, const std::vector<double>& phi) {
  double s = 0.0;
  for (std::size_t c = 0; c < r.mesh().num_cells(); ++c) {
    const double g = cutoff_gradient(r.mesh(), c, phi);
    if (g > 0) s += g * cell_l1(r, c);
  }
  return s;
}

struct Split {
  std::vector<BVFunction> components;
  std::vector<std::vector<double>> cutoffs;
  std::vector<double> coupling;
};

Split split(const BVFunction& u, const CoverSpec& cover, int n, double sharpness) {
  Split s;
  BVFunction r = u;
  for (std::size_t j = 0; j + 1 < cover.sets.size(); ++j) {
    auto phi = cutoff_values(u.mesh(), cover.sets[j], n, sharpness);
    s.coupling.push_back(coupling(r, phi));
    BVFunction piece = cutoff_multiply(r, phi);
    r = r - piece;
    s.components.push_back(std::move(piece));
    s.cutoffs.push_back(std::move(phi));
  }
  s.components.push_back(std::move(r));
  return s;
}

double sup_abs(const BVFunction& u) {
  double m = 0.0;
  for (const auto& cv : u.cell_values())
    for (const auto& v : cv) m = std::max(m, v.cwiseAbs().maxCoeff());
  for (const auto& a : u.atoms()) m = std::max(m, a.jump.cwiseAbs().maxCoeff());
  return m;
}

using ChargeKey = std::tuple<double, double, int>;

std::map<ChargeKey, double> charge_masses(const MatrixMeasure& mu) {
  std::map<ChargeKey, double> out;
  for (const auto& q : mu.singular) out[{q.location.x(), q.location.y(), q.facet}] += q.mass;
  return out;
}

// Points where u is nonzero: vertices with a nonzero one-sided value and atoms with nonzero jump.
std::vector<Point> support_points(const BVFunction& u) {
  std::vector<Point> pts;
  const Mesh& mesh = u.mesh();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cv = mesh.cell(c);
    for (int i = 0; i < mesh.cell_size(); ++i) {
      const Point& p = mesh.vertex(cv[static_cast<std::size_t>(i)]);
      Vector val = u.cell_value(c, i);
      if (mesh.dim() == 1) {
        // Right limit at the left vertex, left limit at the right vertex.
        const double left_of = i == 0 ? std::nextafter(p.x(), std::numeric_limits<double>::infinity()) : p.x();
        val = u.value_in_cell(c, p, left_of);
      }
      if (val.norm() > kZero) pts.push_back(p);
    }
  }
  for (const auto& a : u.atoms())
    if (a.jump.norm() > kZero) pts.emplace_back(a.location, 0.0);
  return pts;
}

// |Du|((K)_{1/(2m)}) for each m of the grid.
std::vector<double> near_masses(const BVFunction& u, const CompactSet& k, const std::vector<int>& ms) {
  const MatrixMeasure du = derivative(u);
  std::vector<double> out;
  for (int m : ms) out.push_back(total_variation(du, Region::neighborhood(k, 0.5 / m)));
  return out;
}

}  // namespace

double cell_l1(const BVFunction& u, std::size_t c) {
  const Mesh& mesh = u.mesh();
  const auto cv = mesh.cell(c);
  if (mesh.dim() == 1) {
    const double l = mesh.vertex(cv[0]).x(), r = mesh.vertex(cv[1]).x();
    std::vector<double> xs{l, r};
    for (const auto& a : u.atoms())
      if (a.location > l && a.location < r) xs.push_back(a.location);
    std::sort(xs.begin(), xs.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double a = xs[i], b = xs[i + 1];
      if (b - a <= 0) continue;
      const double mid = 0.5 * (a + b);
      s += abs_affine(u.value_in_cell(c, Point(a, 0), mid), u.value_in_cell(c, Point(b, 0), mid), b - a);
    }
    return s;
  }
  // Centroids of the 16 congruent subtriangles after two red refinements.
  constexpr int kLevels = 4;
  double s = 0.0;
  int count = 0;
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; i + j < kLevels; ++j) {
      const std::array<std::array<double, 2>, 2> offs{{{1.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3}}};
      for (int up = 0; up < 2; ++up) {
        if (up == 1 && i + j + 1 >= kLevels) continue;
        const double a = (i + offs[static_cast<std::size_t>(up)][0]) / kLevels;
        const double b = (j + offs[static_cast<std::size_t>(up)][1]) / kLevels;
        const double l0 = 1.0 - a - b;
        const Vector v = l0 * u.cell_value(c, 0) + a * u.cell_value(c, 1) + b * u.cell_value(c, 2);
        s += v.norm();
        ++count;
      }
    }
  return s * mesh.cell_measure(c) / count;
}

DecompositionResult local_decompose(const std::vector<BVFunction>& seq, const CoverSpec& cover, int n_max,
                                    const DecomposeOptions& options) {
  if (cover.sets.size() < 2) throw Error("cover needs at least two compact sets");
  if (seq.empty()) throw Error("empty sequence");
  if (n_max < 1) throw Error("n_max must be positive");
  if (!(options.cutoff_sharpness > 1.0)) throw Error("cutoff sharpness must exceed 1");
  for (const auto& k : cover.sets)
    if (k.empty()) throw Error("cover contains an empty set");
  for (const auto& u : seq)
    if (!u.same_mesh(seq.front())) throw Error("sequence members must share one mesh");
  if (!options.select_subsequence && seq.size() < static_cast<std::size_t>(n_max))
    throw Error("prefix too short: need n_max members without subsequence selection");

  DecompositionResult res;
  res.cover = cover;
  res.options = options;

  const Mesh& mesh = seq.front().mesh();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point& p = mesh.vertex(static_cast<int>(v));
    const bool in = std::any_of(cover.sets.begin(), cover.sets.end(),
                                [&](const CompactSet& k) { return k.distance(p) <= kCoverTol; });
    if (!in) ++res.uncovered_vertices;
  }
  res.covered = res.uncovered_vertices == 0;
  if (!res.covered)
    spdlog::warn("cover misses {} of {} mesh vertices; the last component absorbs the remainder",
                 res.uncovered_vertices, mesh.num_vertices());

  // The last member stands in for the limits S_m.
  const std::vector<int> ms = index_grid(1, n_max);
  const std::vector<double> target = near_masses(seq.back(), cover.sets.front(), ms);

  std::size_t k_prev = 0;
  for (int n = 1; n <= n_max; ++n) {
    const double bound = 1.0 / n;
    std::optional<std::pair<std::size_t, Split>> chosen;
    double best = std::numeric_limits<double>::infinity();
    if (!options.select_subsequence) {
      chosen.emplace(static_cast<std::size_t>(n), split(seq[static_cast<std::size_t>(n - 1)], cover, n,
                                                        options.cutoff_sharpness));
    } else {
      for (std::size_t k = k_prev + 1; k <= seq.size(); ++k) {
        Split s = split(seq[k - 1], cover, n, options.cutoff_sharpness);
        double worst = *std::max_element(s.coupling.begin(), s.coupling.end());
        if (options.match_s_table) {
          const auto near = near_masses(seq[k - 1], cover.sets.front(), ms);
          for (std::size_t i = 0; i < ms.size() && ms[i] <= n; ++i)
            worst = std::max(worst, std::abs(near[i] - target[i]));
        }
        best = std::min(best, worst);
        if (worst <= bound) {
          chosen.emplace(k, std::move(s));
          break;
        }
      }
    }
    if (!chosen) {
      std::ostringstream os;
      os << "prefix too short: no member after k=" << k_prev << " reaches coupling and S_m deviation <= 1/" << n
         << " (best " << best << ")";
      throw Error(os.str());
    }
    DecompositionStep step;
    step.n = n;
    step.k = chosen->first;
    step.member = seq[step.k - 1];
    step.components = std::move(chosen->second.components);
    step.cutoffs = std::move(chosen->second.cutoffs);
    step.coupling = std::move(chosen->second.coupling);
    res.subsequence.push_back(step.k);
    res.steps.push_back(std::move(step));
    k_prev = res.subsequence.back();
  }

  // Finite surrogate of S_m = lim_n |Du_n|(Omega cap (K_1)_{1/(2m)}).
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    SmRow row;
    row.m = ms[i];
    row.s_m = target[i];
    const Region region = Region::neighborhood(cover.sets.front(), 0.5 / row.m);
    for (int n = row.m; n <= n_max; ++n) {
      const double tv = total_variation(derivative(res.steps[static_cast<std::size_t>(n - 1)].member), region);
      const double dev = std::abs(tv - row.s_m);
      row.deviation = std::max(row.deviation, dev);
      row.within = row.within && dev <= 1.0 / n + 1e-12;
    }
    res.s_monotone = res.s_monotone && row.s_m <= prev + 1e-12;
    res.s_within = res.s_within && row.within;
    prev = row.s_m;
    res.s_table.push_back(row);
  }
  return res;
}

VerificationReport verify_properties(const DecompositionResult& result) {
  VerificationReport rep;
  const auto& opt = result.options;
  const std::size_t J = result.cover.sets.size();
  rep.property_i = true;
  rep.supports_ok = true;

  std::vector<std::vector<MatrixMeasure>> later(J);
  for (const auto& st : result.steps) {
    const BVFunction& u = st.member;
    const Mesh& mesh = u.mesh();
    const double n = st.n;

    BVFunction sum = st.components.front();
    for (std::size_t j = 1; j < st.components.size(); ++j) sum = sum + st.components[j];
    const BVFunction diff = sum - u;
    rep.reassembly_error = std::max(rep.reassembly_error, sup_abs(diff) / (1.0 + sup_abs(u)));

    // Allowance beyond |Du_n| accumulated over the cutoff stages, with the
    // nominal gradient bound in place of the actual cutoff gradient.
    const double G = 2.0 * n * (1.0 + opt.gradient_slack);
    std::vector<double> allowance(mesh.num_cells(), 0.0);
    std::vector<std::vector<double>> stage_allowance;
    BVFunction r = u;
    for (std::size_t j = 0; j < st.cutoffs.size(); ++j) {
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        if (cutoff_gradient(mesh, c, st.cutoffs[j]) <= 0) continue;
        const double hc = mesh.cell_diameter(c);
        double atoms = 0.0;
        if (mesh.dim() == 1) {
          const auto cv = mesh.cell(c);
          const double l = mesh.vertex(cv[0]).x(), rr = mesh.vertex(cv[1]).x();
          for (const auto& a : r.atoms())
            if (a.location >= l && a.location <= rr) atoms += a.jump.norm();
        }
        allowance[c] += G * cell_l1(r, c) +
                        2.0 * mesh.cell_measure(c) * hc * G * (norm(r.cell_gradient(c)) + atoms / hc);
      }
      stage_allowance.push_back(allowance);
      r = r - st.components[j];
    }
    stage_allowance.push_back(allowance);

    const MatrixMeasure du = derivative(u);
    const auto du_charges = charge_masses(du);
    double slack = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) slack += allowance[c] + mesh.cell_measure(c) / n;
    rep.recorded_slack.push_back(slack);

    for (std::size_t j = 0; j < J; ++j) {
      const BVFunction& uj = st.components[j];
      const MatrixMeasure dj = derivative(uj);
      const auto& allow = stage_allowance[std::min(j, stage_allowance.size() - 1)];
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const double cm = mesh.cell_measure(c);
        const double lhs = norm(dj.density[c]) * cm;
        const double rhs = norm(du.density[c]) * cm + allow[c] + cm / n;
        const double excess = lhs - rhs;
        if (excess > 1e-12 * (1.0 + rhs))
          rep.violations.push_back({st.n, static_cast<int>(j + 1), c, excess});
      }
      for (const auto& [key, mass] : charge_masses(dj)) {
        const auto it = du_charges.find(key);
        const double ref = it == du_charges.end() ? 0.0 : it->second;
        if (mass > ref + 1e-12 * (1.0 + ref)) {
          const auto cell = mesh.locate(Point(std::get<0>(key), std::get<1>(key)));
          rep.violations.push_back({st.n, static_cast<int>(j + 1), cell.value_or(0), mass - ref});
        }
      }

      const double slop = mesh.h();
      for (const Point& p : support_points(uj)) {
        const bool last = j + 1 == J;
        if ((!last || result.covered) && result.cover.sets[j].distance(p) > 1.0 / n + slop) rep.supports_ok = false;
        for (std::size_t i = 0; i < j; ++i)
          if (result.cover.sets[i].distance(p) < 0.5 / n - slop) rep.supports_ok = false;
      }
      if (j >= 1) later[j].push_back(dj);
    }
  }
  rep.reassembly_ok = rep.reassembly_error <= 1e-14;
  rep.property_i = rep.violations.empty();

  rep.property_ii_ok = true;
  CompactSet before = result.cover.sets.front();
  for (std::size_t j = 1; j < J; ++j) {
    ChargeReport cr = does_not_charge(later[j], before, opt.deltas, opt.charge_threshold);
    rep.property_ii_ok = rep.property_ii_ok && cr.tight;
    rep.property_ii.push_back(std::move(cr));
    before.add(result.cover.sets[j]);
  }
  return rep;
}

}  // namespace wlsc
