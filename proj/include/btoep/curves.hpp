#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/errors.hpp"
#include "btoep/parallel.hpp"
#include "btoep/roots.hpp"
#include "btoep/symbol.hpp"

namespace btoep {

enum class EndpointKind { BranchPoint, Junction, Truncation, Exceptional };

struct ArcEndpoint {
  EndpointKind kind = EndpointKind::Exceptional;
  cplx where;
};

/// One analytic arc of Gamma_k as an oriented polyline with unit tangents.
struct CurveArc {
  int k = 0;
  std::vector<cplx> points;
  std::vector<cplx> tangents;
  ArcEndpoint begin, end;

  double length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) s += std::abs(points[i] - points[i - 1]);
    return s;
  }
};

struct CurveFamily {
  int k = 0;
  std::vector<CurveArc> arcs;
  std::vector<cplx> special_points;  // branch points on Gamma_k plus junctions
  double truncation_radius = 0.0;
  double grid_step = 0.0;

  bool has_truncation() const {
    for (const CurveArc& a : arcs)
      if (a.begin.kind == EndpointKind::Truncation || a.end.kind == EndpointKind::Truncation)
        return true;
    return false;
  }
};

struct TraceOptions {
  double r_max = 10.0;
  double grid_step = 0.0;        // 0: window diameter / 400
  int coarse_cells = 120;        // coarse scan resolution per axis
  double on_curve_tol = 1e-9;    // corrector success threshold on the gap
  int max_steps = 200000;
};

inline double point_segment_distance(cplx z, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

inline double distance_to_arc(const CurveArc& arc, cplx z) {
  double best = std::numeric_limits<double>::infinity();
  if (arc.points.size() == 1) return std::abs(z - arc.points[0]);
  for (std::size_t i = 1; i < arc.points.size(); ++i)
    best = std::min(best, point_segment_distance(z, arc.points[i - 1], arc.points[i]));
  return best;
}

inline double distance_to_family(const CurveFamily& f, cplx z) {
  double best = std::numeric_limits<double>::infinity();
  for (const CurveArc& a : f.arcs) best = std::min(best, distance_to_arc(a, z));
  return best;
}

namespace detail {

/// Bracketed minimization of a nonnegative valley function. Scans the
/// interval, then golden-sections the best bracket until the position
/// tolerance or the value target is met. Returns (position, value).
template <typename F>
std::pair<double, double> valley_min(F&& f, double lo, double hi, double xtol, double ftarget) {
  constexpr int kScan = 11;
  double xs[kScan], fs[kScan];
  for (int i = 0; i < kScan; ++i) {
    xs[i] = lo + (hi - lo) * i / (kScan - 1);
    fs[i] = f(xs[i]);
  }
  // start from the center so a flat valley cannot drift to the window edge
  int best = kScan / 2;
  for (int i = 0; i < kScan; ++i)
    if (fs[i] < fs[best]) best = i;
  double a = xs[std::max(0, best - 1)];
  double b = xs[std::min(kScan - 1, best + 1)];
  double fb = fs[best], xb = xs[best];
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol && fb > ftarget) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
    if (f1 < fb) {
      fb = f1;
      xb = x1;
    }
    if (f2 < fb) {
      fb = f2;
      xb = x2;
    }
  }
  return {xb, fb};
}

/// Incremental tracer for one curve family.
class CurveTracer {
 public:
  CurveTracer(const LaurentSymbol& a, int k, TraceOptions opts)
      : a_(a), k_(k), opts_(opts) {
    if (k < -a.q() + 1 || k > a.p() - 1) throw IndexOutOfRange("curve index k out of range");
    if (opts_.grid_step <= 0.0) opts_.grid_step = 2.0 * opts_.r_max / 400.0;
    h_max_ = opts_.grid_step;
    h_min_ = opts_.grid_step / 10.0;
    all_branch_ = branch_points_unique(a_);
    for (const auto& [bp, mult] : all_branch_) {
      RootSystem rs = roots_at(a_, bp);
      if (rs.tied(a_.q() + k_ - 1, a_.q() + k_)) branch_on_curve_.push_back(bp);
    }
  }

  CurveFamily run() {
    CurveFamily fam;
    fam.k = k_;
    fam.truncation_radius = opts_.r_max;
    fam.grid_step = opts_.grid_step;

    std::vector<std::pair<cplx, double>> seeds;  // position, polish window
    seed_branch_rings(seeds);
    if (k_ != 0) seed_circle(seeds);
    seed_grid(seeds);

    for (auto [s, window] : seeds) {
      if (std::abs(s) > opts_.r_max) continue;
      if (near_registry(s, 1.5 * local_h(s))) continue;
      std::optional<cplx> polished = polish_to_curve(s, window);
      if (!polished || std::abs(*polished) > opts_.r_max) continue;
      if (near_registry(*polished, 1.5 * local_h(*polished))) continue;
      trace_from(*polished, fam);
    }
    if (fam.arcs.empty()) throw SeedingFailure("no curve points found for this index");

    collect_special_points(fam);
    return fam;
  }

 private:
  const LaurentSymbol& a_;
  int k_;
  TraceOptions opts_;
  double h_max_ = 0.0, h_min_ = 0.0;

  // Marching resolution follows the local magnitude so unit-scale curve
  // structure survives large truncation windows.
  double local_h(cplx x) const {
    double h = std::max(0.05 * (0.1 + std::abs(x)), h_max_ / 100.0);
    return std::min(h_max_, h);
  }
  double local_h_min(cplx x) const { return local_h(x) / 10.0; }
  std::vector<std::pair<cplx, int>> all_branch_;
  std::vector<cplx> branch_on_curve_;
  std::vector<cplx> registry_;
  std::vector<cplx> junctions_;
  mutable RootSystem warm_;
  mutable bool have_warm_ = false;

  double gap(cplx z) const {
    RootSystem rs = roots_at(a_, z, 1e-13, have_warm_ ? &warm_ : nullptr);
    double g = modulus_gap(rs, k_);
    warm_ = std::move(rs);
    have_warm_ = true;
    return g;
  }

  bool near_registry(cplx z, double r) const {
    for (cplx s : registry_)
      if (std::abs(z - s) < r) return true;
    return false;
  }

  // ---- seeding ----------------------------------------------------------

  void seed_branch_rings(std::vector<std::pair<cplx, double>>& seeds) const {
    for (cplx bp : branch_on_curve_) {
      double ring = std::max(1e-3 * (1.0 + std::abs(bp)), 2.0 * local_h_min(bp));
      ring = std::min(ring, 0.5 * local_h(bp) + 1e-3 * (1.0 + std::abs(bp)));
      const int m = 96;
      std::vector<double> g(m);
      for (int i = 0; i < m; ++i) {
        double th = 2.0 * pi * i / m;
        g[static_cast<std::size_t>(i)] = gap(bp + ring * cplx(std::cos(th), std::sin(th)));
      }
      for (int i = 0; i < m; ++i) {
        double prev = g[static_cast<std::size_t>((i + m - 1) % m)];
        double next = g[static_cast<std::size_t>((i + 1) % m)];
        double cur = g[static_cast<std::size_t>(i)];
        if (cur <= prev && cur <= next) {
          double th0 = 2.0 * pi * (i - 1) / m, th1 = 2.0 * pi * (i + 1) / m;
          auto [th, val] = valley_min(
              [&](double t) { return gap(bp + ring * cplx(std::cos(t), std::sin(t))); }, th0, th1,
              1e-10, 0.1 * opts_.on_curve_tol);
          // keep the polish window local so the seed cannot slide into the
          // smeared root neighborhood of the branch point itself
          if (val < 1e3 * opts_.on_curve_tol)
            seeds.emplace_back(bp + ring * cplx(std::cos(th), std::sin(th)), ring / 3.0);
        }
      }
    }
  }

  void seed_circle(std::vector<std::pair<cplx, double>>& seeds) const {
    const int m = std::max(360, 90 * a_.span());
    const double r = opts_.r_max * (1.0 - 1e-9);
    std::vector<double> g(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      double th = 2.0 * pi * i / m;
      g[static_cast<std::size_t>(i)] = gap(r * cplx(std::cos(th), std::sin(th)));
    }
    for (int i = 0; i < m; ++i) {
      double prev = g[static_cast<std::size_t>((i + m - 1) % m)];
      double next = g[static_cast<std::size_t>((i + 1) % m)];
      double cur = g[static_cast<std::size_t>(i)];
      if (cur <= prev && cur <= next && cur < 0.5) {
        double th0 = 2.0 * pi * (i - 1) / m, th1 = 2.0 * pi * (i + 1) / m;
        auto [th, val] = valley_min(
            [&](double t) { return gap(r * cplx(std::cos(t), std::sin(t))); }, th0, th1, 1e-12,
            0.1 * opts_.on_curve_tol);
        if (val < opts_.on_curve_tol)
          seeds.emplace_back(r * cplx(std::cos(th), std::sin(th)), 0.5 * opts_.grid_step);
      }
    }
  }

  void scan_window(std::vector<std::pair<cplx, double>>& seeds, double w, int cells) const {
    // half-step lattice: 9 probes per cell; a folded valley bisecting a cell
    // symmetrically is still caught by the center and edge-midpoint values
    const int m = 2 * cells - 1;
    std::vector<double> g(static_cast<std::size_t>(m) * m);
    const double cell = 2.0 * w / (cells - 1);
    const double half = 0.5 * cell;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t row) {
      RootSystem local_warm;
      bool warm_ok = false;
      for (int cidx = 0; cidx < m; ++cidx) {
        cplx z(-w + half * cidx, -w + half * static_cast<double>(row));
        RootSystem rs = roots_at(a_, z, 1e-13, warm_ok ? &local_warm : nullptr);
        g[row * static_cast<std::size_t>(m) + static_cast<std::size_t>(cidx)] = modulus_gap(rs, k_);
        local_warm = std::move(rs);
        warm_ok = true;
      }
    });
    auto at = [&](int r, int c) { return g[static_cast<std::size_t>(r) * m + c]; };
    for (int r = 0; r + 2 < m; r += 2)
      for (int c = 0; c + 2 < m; c += 2) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int dr = 0; dr <= 2; ++dr)
          for (int dc = 0; dc <= 2; ++dc) {
            double v = at(r + dr, c + dc);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        if (lo > 1.5 * (hi - lo) + 1e3 * opts_.on_curve_tol) continue;
        cplx p00(-w + half * c, -w + half * r);
        cplx p11 = p00 + cplx(cell, cell);
        cplx p01 = p00 + cplx(cell, 0.0);
        cplx p10 = p00 + cplx(0.0, cell);
        for (auto [e0, e1] : {std::pair{p00, p11}, std::pair{p01, p10}}) {
          auto [t, val] =
              valley_min([&](double s) { return gap(e0 + s * (e1 - e0)); }, 0.0, 1.0, 1e-9,
                         0.1 * opts_.on_curve_tol);
          if (val < 1e2 * opts_.on_curve_tol) {
            seeds.emplace_back(e0 + t * (e1 - e0), 0.75 * opts_.grid_step);
            break;
          }
        }
      }
  }

  void seed_grid(std::vector<std::pair<cplx, double>>& seeds) const {
    scan_window(seeds, opts_.r_max, opts_.coarse_cells);
    // finer pass over the core window where the bounded structure lives
    double core = 0.0;
    for (const auto& [bp, mult] : all_branch_) core = std::max(core, std::abs(bp));
    core = 1.5 * core + 0.5;
    if (core < 0.45 * opts_.r_max) scan_window(seeds, core, opts_.coarse_cells);
  }

  // ---- on-curve machinery ------------------------------------------------

  /// Transversal minimization of the gap through x along direction dir.
  std::pair<cplx, double> correct(cplx x, cplx dir, double window) const {
    auto [s, val] = valley_min([&](double t) { return gap(x + t * dir); }, -window, window,
                               std::max(1e-9 * window, 1e-14 * (1.0 + std::abs(x))),
                               0.05 * opts_.on_curve_tol);
    return {x + s * dir, val};
  }

  /// Polish an approximate seed onto the curve with two alternating
  /// transversal passes. Returns nothing when the point will not converge.
  std::optional<cplx> polish_to_curve(cplx s, double window) const {
    if (gap(s) < opts_.on_curve_tol) return s;
    cplx x = s;
    double w = window;
    for (int pass = 0; pass < 4; ++pass) {
      auto [x1, g1] = correct(x, cplx(1.0, 0.0), w);
      auto [x2, g2] = correct(x1, cplx(0.0, 1.0), w);
      x = x2;
      if (g2 < opts_.on_curve_tol) return x;
      w *= 0.5;
    }
    // final attempt along the local gradient direction
    std::optional<cplx> t = tangent_at(x);
    if (t) {
      auto [x3, g3] = correct(x, *t * cplx(0.0, 1.0), window);
      if (g3 < opts_.on_curve_tol) return x3;
    }
    return std::nullopt;
  }

  /// Unit tangent up to sign from two-sided offsets of the gap field. The
  /// probe distance escalates until the folded gradient rises above the
  /// evaluation noise, which matters on shallow far-field curve segments.
  std::optional<cplx> tangent_at(cplx x) const {
    double delta = 1e-5 * (local_h_min(x) + 1e-3 * std::abs(x));
    const double delta_cap = 0.05 * local_h(x);
    const double noise = 1e-10;
    double gE = 0, gW = 0, gN = 0, gS = 0;
    for (;;) {
      gE = gap(x + delta);
      gW = gap(x - delta);
      gN = gap(x + cplx(0.0, delta));
      gS = gap(x - cplx(0.0, delta));
      if (std::max({gE, gW, gN, gS}) > 30.0 * noise || delta >= delta_cap) break;
      delta = std::min(8.0 * delta, delta_cap);
    }
    double gx = (gE + gW) / (2.0 * delta);
    double gy = (gN + gS) / (2.0 * delta);
    double norm = std::hypot(gx, gy);
    // below ~30x the noise floor the folded gradient is meaningless and the
    // caller should coast along its current direction instead
    if (!(norm > 0.0) || std::max({gE, gW, gN, gS}) <= 30.0 * noise) return std::nullopt;
    // component signs of the gradient are lost by the folded field; test
    // both tangent candidates a step ahead and keep the one staying low
    cplx cand1 = cplx(-gy, gx) / norm;
    cplx cand2 = cplx(gy, gx) / norm;
    double probe = 8.0 * delta;
    double g1 = std::min(gap(x + probe * cand1), gap(x - probe * cand1));
    double g2 = std::min(gap(x + probe * cand2), gap(x - probe * cand2));
    return g1 <= g2 ? cand1 : cand2;
  }

  std::optional<cplx> branch_near(cplx x, double r) const {
    for (cplx bp : branch_on_curve_)
      if (std::abs(x - bp) < r) return bp;
    return std::nullopt;
  }

  std::optional<cplx> registry_hit(cplx x, double r) const {
    double best = r;
    std::optional<cplx> hit;
    for (cplx s : registry_)
      if (std::abs(x - s) < best) {
        best = std::abs(x - s);
        hit = s;
      }
    return hit;
  }

  // ---- marching ----------------------------------------------------------

  struct HalfTrace {
    std::vector<cplx> points;
    ArcEndpoint end;
  };

  /// Keeps the sample spacing below the max step when a terminal snap jumps
  /// further than one marching step: intermediate points are dropped on the
  /// chord and re-corrected transversally where that is reliable.
  void emit_terminal_path(HalfTrace& out, cplx x, cplx target) const {
    double dist = std::abs(target - x);
    double hloc = std::min(local_h(x), local_h(target));
    if (dist <= hloc) return;
    int pieces = static_cast<int>(std::ceil(dist / (0.9 * hloc)));
    cplx step = (target - x) / static_cast<double>(pieces);
    cplx normal = cplx(0.0, 1.0) * unitize(step);
    for (int i = 1; i < pieces; ++i) {
      cplx p = x + step * static_cast<double>(i);
      if (std::abs(p - target) > 1e-3 * (1.0 + std::abs(target))) {
        auto [pc, gc] = correct(p, normal, 0.3 * hloc);
        if (gc < opts_.on_curve_tol) p = pc;
      }
      out.points.push_back(p);
    }
  }

  HalfTrace march(cplx x0, cplx tau0) const {
    HalfTrace out;
    cplx x = x0;
    cplx tau = tau0;
    double h = 0.5 * local_h(x0);
    for (int step = 0; step < opts_.max_steps; ++step) {
      h = std::clamp(h, local_h_min(x), local_h(x));
      bool accepted = false;
      cplx xn, taun;
      while (!accepted) {
        cplx xp = x + h * tau;
        auto [xc, gc] = correct(xp, cplx(0.0, 1.0) * tau, 0.7 * h);
        std::optional<cplx> tn = gc < opts_.on_curve_tol ? tangent_at(xc) : std::nullopt;
        if (gc < opts_.on_curve_tol && !tn) {
          // shallow stretch: the gap resolves no transversal position;
          // continue straight, or re-center on the corrected point when the
          // raw predictor has drifted measurably
          xn = gap(xp) < 1e-8 ? xp : xc;
          taun = tau;
          accepted = true;
          h = std::min(h * 1.3, local_h(xn));
          break;
        }
        bool ok = gc < opts_.on_curve_tol && tn.has_value();
        if (ok) {
          taun = *tn;
          if ((taun * std::conj(tau)).real() < 0.0) taun = -taun;
          double turn = std::abs(std::arg(taun * std::conj(tau)));
          double corr = std::abs(xc - xp);
          if (turn > 0.45 || corr > 0.55 * h) ok = false;
          if (ok) {
            xn = xc;
            accepted = true;
            if (turn < 0.12 && corr < 0.1 * h) h = std::min(h * 1.3, local_h(xc));
          }
        }
        if (!ok && !accepted) {
          if (h <= local_h_min(x) * 1.0001) {
            out.end = {EndpointKind::Exceptional, x};
            return out;
          }
          h = std::max(0.5 * h, local_h_min(x));
        }
      }

      // truncation at the window boundary
      if (std::abs(xn) > opts_.r_max) {
        cplx d = xn - x;
        double A = std::norm(d), B = 2.0 * (x * std::conj(d)).real(),
               C = std::norm(x) - sq(opts_.r_max);
        double disc = std::max(0.0, B * B - 4.0 * A * C);
        double t = (-B + std::sqrt(disc)) / (2.0 * A);
        out.points.push_back(x + std::clamp(t, 0.0, 1.0) * d);
        out.end = {EndpointKind::Truncation, out.points.back()};
        return out;
      }
      // branch point snap: terminate when the step passes or lands within
      // the snap radius, but not when leaving a seed placed next to it
      {
        double snap = std::max(1.2 * h, 2e-4 * (1.0 + std::abs(xn)));
        std::optional<cplx> hit;
        double best = snap;
        for (cplx bp : branch_on_curve_) {
          cplx d = xn - x;
          double t = std::norm(d) > 0.0 ? ((bp - x) * std::conj(d)).real() / std::norm(d) : 0.0;
          if (t < -0.05) continue;  // behind the step: marching away
          double dist = point_segment_distance(bp, x, xn);
          if (dist < best) {
            best = dist;
            hit = bp;
          }
        }
        if (hit) {
          emit_terminal_path(out, x, *hit);
          out.points.push_back(*hit);
          out.end = {EndpointKind::BranchPoint, *hit};
          return out;
        }
      }
      // collision with previously traced arcs
      if (std::optional<cplx> hit = registry_hit(xn, 0.6 * h)) {
        emit_terminal_path(out, x, *hit);
        out.points.push_back(*hit);
        out.end = {EndpointKind::Junction, *hit};
        return out;
      }
      // self-collision: closed loop back to the start
      if (static_cast<int>(out.points.size()) > 20 && std::abs(xn - x0) < 0.6 * h) {
        emit_terminal_path(out, x, x0);
        out.points.push_back(x0);
        out.end = {EndpointKind::Junction, x0};
        return out;
      }

      out.points.push_back(xn);
      x = xn;
      tau = taun;
    }
    out.end = {EndpointKind::Exceptional, x};
    return out;
  }

  void trace_from(cplx seed, CurveFamily& fam) {
    std::optional<cplx> tau = tangent_at(seed);
    if (!tau) return;
    HalfTrace fwd = march(seed, *tau);
    HalfTrace bwd;
    bool closed_loop = fwd.end.kind == EndpointKind::Junction &&
                       std::abs(fwd.end.where - seed) < 1e-12 * (1.0 + std::abs(seed));
    if (closed_loop)
      bwd.end = {EndpointKind::Junction, seed};
    else
      bwd = march(seed, -*tau);

    CurveArc arc;
    arc.k = k_;
    arc.begin = bwd.end;
    arc.end = fwd.end;
    for (auto it = bwd.points.rbegin(); it != bwd.points.rend(); ++it) arc.points.push_back(*it);
    arc.points.push_back(seed);
    arc.points.insert(arc.points.end(), fwd.points.begin(), fwd.points.end());
    if (arc.points.size() < 2) return;

    arc.tangents.resize(arc.points.size());
    for (std::size_t i = 0; i < arc.points.size(); ++i) {
      std::size_t lo = i > 0 ? i - 1 : 0;
      std::size_t hi = i + 1 < arc.points.size() ? i + 1 : arc.points.size() - 1;
      arc.tangents[i] = unitize(arc.points[hi] - arc.points[lo]);
    }

    registry_.insert(registry_.end(), arc.points.begin(), arc.points.end());
    if (arc.begin.kind == EndpointKind::Junction || arc.begin.kind == EndpointKind::Exceptional)
      junctions_.push_back(arc.begin.where);
    if (arc.end.kind == EndpointKind::Junction || arc.end.kind == EndpointKind::Exceptional)
      junctions_.push_back(arc.end.where);
    fam.arcs.push_back(std::move(arc));
  }

  void collect_special_points(CurveFamily& fam) const {
    std::vector<cplx> specials = branch_on_curve_;
    // cluster junction/exceptional endpoints
    std::vector<cplx> pending = junctions_;
    std::vector<bool> used(pending.size(), false);
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (used[i]) continue;
      cplx c = pending[i];
      double r = 3.0 * local_h_min(c);
      int n = 1;
      used[i] = true;
      for (std::size_t j = i + 1; j < pending.size(); ++j) {
        if (used[j]) continue;
        if (std::abs(pending[j] - c) < r) {
          c = (c * double(n) + pending[j]) / double(n + 1);
          ++n;
          used[j] = true;
        }
      }
      bool dup = false;
      for (cplx s : specials)
        if (std::abs(s - c) < r) dup = true;
      if (!dup) specials.push_back(c);
    }
    std::sort(specials.begin(), specials.end(), [](cplx x, cplx y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    });
    fam.special_points = specials;
  }
};

}  // namespace detail

/// Traces Gamma_k inside the disk of radius r_max as oriented polylines.
/// Seeds come from branch points on the curve, from the truncation circle
/// (unbounded curves) and from a grid scan of the modulus gap; each seed is
/// marched in both directions by a predictor-corrector that re-minimizes
/// the gap transversally.
inline CurveFamily trace_curve(const LaurentSymbol& a, int k, const TraceOptions& opts) {
  detail::CurveTracer tracer(a, k, opts);
  return tracer.run();
}

inline CurveFamily trace_curve(const LaurentSymbol& a, int k, double r_max, double grid_step = 0.0) {
  TraceOptions opts;
  opts.r_max = r_max;
  opts.grid_step = grid_step;
  return trace_curve(a, k, opts);
}

/// Analytic-continuation permutation across an arc at a regular sample:
/// pi[i] = j when the i-th root (modulus order) on the +side continues to
/// the j-th root on the -side. The +side lies to the left of the tangent.
inline std::vector<int> continuation_permutation(const LaurentSymbol& a, const CurveArc& arc,
                                                 std::size_t sample_index) {
  if (sample_index >= arc.points.size()) throw IndexOutOfRange("sample index out of range");
  cplx x = arc.points[sample_index];
  cplx tau = arc.tangents[sample_index];

  RootSystem rs = roots_at(a, x);
  double sep = std::numeric_limits<double>::infinity();
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rs.count(); ++i) {
    for (int j = i + 1; j < rs.count(); ++j)
      sep = std::min(sep, std::abs(rs.roots[static_cast<std::size_t>(i)] -
                                   rs.roots[static_cast<std::size_t>(j)]));
    if (rs.deriv_ok[static_cast<std::size_t>(i)])
      dmin = std::min(dmin, 1.0 / std::abs(rs.derivs[static_cast<std::size_t>(i)]));
    else
      dmin = 0.0;
  }
  if (!(sep > 0.0) || dmin == 0.0)
    throw AmbiguousMatching("sample too close to a branch point for continuation");

  double eps = std::min(0.05 * sep * dmin, 1e-3 * (1.0 + std::abs(x)));
  eps = std::max(eps, 1e-9 * (1.0 + std::abs(x)));
  RootSystem plus = roots_at(a, x + cplx(0.0, 1.0) * tau * eps);
  RootSystem minus = roots_at(a, x - cplx(0.0, 1.0) * tau * eps);

  const int n = rs.count();
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      double d = std::abs(plus.roots[static_cast<std::size_t>(i)] -
                          minus.roots[static_cast<std::size_t>(j)]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (best < 0 || taken[static_cast<std::size_t>(best)] || bd > 0.45 * sep)
      throw AmbiguousMatching("nearest-neighbor continuation is not a bijection");
    taken[static_cast<std::size_t>(best)] = true;
    perm[static_cast<std::size_t>(i)] = best;
  }
  return perm;
}

}  // namespace btoep
