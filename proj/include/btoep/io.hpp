#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "btoep/common.hpp"
#include "btoep/convergence.hpp"
#include "btoep/curves.hpp"
#include "btoep/errors.hpp"
#include "btoep/measures.hpp"
#include "btoep/symbol.hpp"
#include "btoep/toeplitz.hpp"

namespace btoep {

/// Shortest round-trip decimal form, locale independent.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- symbol JSON ----------------------------------------------------------

/// {"coeffs": {"-1": [re, im], "0": [re, im], ...}}
inline LaurentSymbol symbol_from_json(const nlohmann::json& j) {
  if (!j.contains("coeffs") || !j["coeffs"].is_object())
    throw UsageError("symbol JSON requires a \"coeffs\" object");
  std::map<int, cplx> spec;
  for (const auto& [key, value] : j["coeffs"].items()) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw UsageError("coefficient key is not a decimal integer: " + key);
    }
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number())
      throw UsageError("coefficient value must be a [re, im] pair: " + key);
    spec[k] = cplx(value[0].get<double>(), value[1].get<double>());
  }
  return parse_symbol(spec);
}

inline LaurentSymbol load_symbol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open symbol file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError(std::string("symbol file is not valid JSON: ") + e.what());
  }
  return symbol_from_json(j);
}

inline nlohmann::json symbol_to_json(const LaurentSymbol& a) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (int k = -a.q(); k <= a.p(); ++k) {
    cplx c = a.coeff(k);
    if (std::abs(c) == 0.0) continue;
    coeffs[std::to_string(k)] = {c.real(), c.imag()};
  }
  return nlohmann::json{{"coeffs", coeffs}};
}

// ---- CSV writers ----------------------------------------------------------

inline std::string curves_csv(const CurveFamily& f) {
  std::ostringstream out;
  out << "k,arc_id,re_lambda,im_lambda,re_tangent,im_tangent\n";
  for (std::size_t arc_id = 0; arc_id < f.arcs.size(); ++arc_id) {
    const CurveArc& arc = f.arcs[arc_id];
    for (std::size_t i = 0; i < arc.points.size(); ++i)
      out << f.k << ',' << arc_id << ',' << fmt(arc.points[i].real()) << ','
          << fmt(arc.points[i].imag()) << ',' << fmt(arc.tangents[i].real()) << ','
          << fmt(arc.tangents[i].imag()) << '\n';
  }
  return out.str();
}

inline std::string measure_csv(int k, const DiscreteMeasure& m) {
  std::ostringstream out;
  out << "k,arc_id,re_lambda,im_lambda,real_density,weight\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    double density = m.spacing.size() == m.size() && m.spacing[i] > 0.0
                         ? m.weights[i] / m.spacing[i]
                         : 0.0;
    int arc_id = m.arc.size() == m.size() ? m.arc[i] : -1;
    out << k << ',' << arc_id << ',' << fmt(m.points[i].real()) << ',' << fmt(m.points[i].imag())
        << ',' << fmt(density) << ',' << fmt(m.weights[i]) << '\n';
  }
  return out.str();
}

inline std::string spectrum_csv(const SpectralSet& s) {
  std::ostringstream out;
  out << "k,n,re_lambda,im_lambda,multiplicity\n";
  for (std::size_t i = 0; i < s.zeros.size(); ++i)
    out << s.k << ',' << s.n << ',' << fmt(s.zeros[i].real()) << ',' << fmt(s.zeros[i].imag())
        << ',' << s.mult[i] << '\n';
  return out.str();
}

inline std::string convergence_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "k,n,mass,cauchy_error,curve_distance\n";
  for (const ConvergenceEntry& e : r.entries)
    out << r.k << ',' << e.n << ',' << fmt(e.mass) << ',' << fmt(e.cauchy_error) << ','
        << fmt(e.curve_distance) << '\n';
  return out.str();
}

// ---- JSON summaries -------------------------------------------------------

inline nlohmann::json masses_json(const LaurentSymbol& a,
                                  const std::map<int, double>& masses) {
  nlohmann::json jm = nlohmann::json::object();
  nlohmann::json ja = nlohmann::json::object();
  for (const auto& [k, mass] : masses) {
    jm[std::to_string(k)] = mass;
    ja[std::to_string(k)] = alpha_k(a, k);
  }
  return nlohmann::json{{"masses", jm}, {"alpha", ja}};
}

struct ElResidualRecord {
  int k = 0;
  cplx lambda;
  double value = 0.0;
};

inline nlohmann::json energy_json(double j_direct, double j_alt, double j_matrix,
                                  const std::map<int, double>& l_constants,
                                  const std::vector<ElResidualRecord>& residuals) {
  nlohmann::json jl = nlohmann::json::object();
  for (const auto& [k, l] : l_constants) jl[std::to_string(k)] = l;
  nlohmann::json jr = nlohmann::json::array();
  for (const ElResidualRecord& r : residuals)
    jr.push_back({{"k", r.k}, {"lambda", {r.lambda.real(), r.lambda.imag()}}, {"value", r.value}});
  return nlohmann::json{{"J_direct", j_direct},
                        {"J_alt", j_alt},
                        {"J_matrix", j_matrix},
                        {"l", jl},
                        {"residuals", jr}};
}

// ---- SVG ------------------------------------------------------------------

/// Fixed-viewBox plot: curve families as polylines, spectra as dots.
class SvgPlot {
 public:
  SvgPlot(double extent) : extent_(extent > 0.0 ? extent : 1.0) {}

  void add_family(const CurveFamily& f) {
    for (const CurveArc& arc : f.arcs) {
      std::ostringstream pts;
      for (std::size_t i = 0; i < arc.points.size(); ++i) {
        auto [x, y] = map(arc.points[i]);
        pts << (i ? " " : "") << fmt(x) << ',' << fmt(y);
      }
      body_ << "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\""
            << pts.str() << "\"/>\n";
    }
  }

  void add_spectrum(const SpectralSet& s) {
    for (cplx z : s.flat()) {
      auto [x, y] = map(z);
      body_ << "  <circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
            << "\" r=\"2.4\" fill=\"#c0392b\"/>\n";
    }
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << size_ << ' ' << size_
        << "\">\n";
    out << "  <rect width=\"" << size_ << "\" height=\"" << size_ << "\" fill=\"white\"/>\n";
    // axes through the origin
    auto [ox, oy] = map(cplx(0.0, 0.0));
    out << "  <line x1=\"0\" y1=\"" << fmt(oy) << "\" x2=\"" << size_ << "\" y2=\"" << fmt(oy)
        << "\" stroke=\"#999\" stroke-width=\"0.75\"/>\n";
    out << "  <line x1=\"" << fmt(ox) << "\" y1=\"0\" x2=\"" << fmt(ox) << "\" y2=\"" << size_
        << "\" stroke=\"#999\" stroke-width=\"0.75\"/>\n";
    out << body_.str();
    out << "</svg>\n";
    return out.str();
  }

 private:
  std::pair<double, double> map(cplx z) const {
    double s = size_ / (2.0 * extent_);
    return {(z.real() + extent_) * s, (extent_ - z.imag()) * s};
  }

  double extent_;
  double size_ = 640.0;
  std::ostringstream body_;
};

inline void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  out << content;
}

}  // namespace btoep
