#include "semg/bench_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "semg/errors.hpp"

namespace semg::bench {
namespace {

std::string num(double v, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string curves_csv(const std::vector<CmrrCurve>& curves) {
  std::ostringstream os;
  os << "freq_hz,cmrr_db,source,flag\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      os << num(p.freq, 4) << ',';
      if (!is_failure(p.flag)) os << num(p.cmrr_db, 4);
      os << ',' << to_string(c.source) << ',' << to_string(p.flag) << '\n';
    }
  }
  return os.str();
}

std::string comparison_table(const TheoryComparison& cmp) {
  std::ostringstream os;
  os << pad("freq_hz", 9) << pad("measured", 10) << pad("filter", 9) << pad("gain", 9)
     << pad("input", 9) << pad("amp", 9) << pad("composite", 11) << pad("delta", 8) << "  limiter\n";
  for (const auto& r : cmp.rows) {
    os << pad(num(r.freq, 2), 9) << pad(r.measured ? num(*r.measured, 2) : "--", 10)
       << pad(num(r.components.filter, 2), 9) << pad(num(r.components.gain_mismatch, 2), 9)
       << pad(num(r.components.input_impedance, 2), 9) << pad(num(r.components.amplifier, 2), 9)
       << pad(num(r.composite, 2), 11) << pad(r.measured ? num(r.delta, 2) : "--", 8) << "  "
       << to_string(r.limiting) << '\n';
  }
  os << "mean measured CMRR: " << num(cmp.mean_measured, 2) << " dB\n"
     << "mean composite theory: " << num(cmp.mean_composite, 2) << " dB\n"
     << "max |delta|: " << num(cmp.max_abs_delta, 2) << " dB\n";
  return os.str();
}

std::string curves_svg(const std::vector<CmrrCurve>& curves, const std::vector<std::string>& labels) {
  if (curves.size() != labels.size()) throw DomainError("one label per curve required");
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 20, B = 50;
  double fmin = INFINITY, fmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      if (is_failure(p.flag) || !(p.freq > 0.0)) continue;
      fmin = std::min(fmin, p.freq);
      fmax = std::max(fmax, p.freq);
      ymin = std::min(ymin, p.cmrr_db);
      ymax = std::max(ymax, p.cmrr_db);
    }
  }
  if (!(fmin < fmax)) {
    fmin = 10.0;
    fmax = 500.0;
  }
  if (!(ymin < ymax)) {
    ymin = 0.0;
    ymax = 100.0;
  }
  ymin = 10.0 * std::floor(ymin / 10.0);
  ymax = 10.0 * std::ceil(ymax / 10.0);
  if (ymax == ymin) ymax += 10.0;
  auto x = [&](double f) { return L + (W - L - R) * std::log(f / fmin) / std::log(fmax / fmin); };
  auto y = [&](double v) { return T + (H - T - B) * (ymax - v) / (ymax - ymin); };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<g stroke=\"#ccc\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double v = ymin; v <= ymax + 1e-9; v += 10.0) {
    os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << y(v) << "\" y2=\"" << y(v)
       << "\"/><text stroke=\"none\" x=\"" << L - 6 << "\" y=\"" << y(v) + 4
       << "\" text-anchor=\"end\">" << num(v, 0) << "</text>\n";
  }
  for (double decade = std::pow(10.0, std::floor(std::log10(fmin))); decade <= fmax; decade *= 10.0) {
    for (int m = 1; m < 10; ++m) {
      const double f = decade * m;
      if (f < fmin || f > fmax) continue;
      os << "<line x1=\"" << x(f) << "\" x2=\"" << x(f) << "\" y1=\"" << T << "\" y2=\"" << H - B
         << "\"/>";
      if (m == 1 || m == 2 || m == 5) {
        os << "<text stroke=\"none\" x=\"" << x(f) << "\" y=\"" << H - B + 16
           << "\" text-anchor=\"middle\">" << num(f, 0) << "</text>";
      }
      os << '\n';
    }
  }
  os << "</g>\n<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">frequency (Hz)</text>\n"
     << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 14 " << (T + H - B) / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">CMRR (dB)</text>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : curves[i].points) {
      if (is_failure(p.flag) || !(p.freq > 0.0)) continue;
      os << x(p.freq) << ',' << y(p.cmrr_db) << ' ';
    }
    os << "\"/>\n<text x=\"" << W - R - 150 << "\" y=\"" << T + 16 + 14 * static_cast<double>(i)
       << "\" fill=\"" << color << "\" font-family=\"sans-serif\" font-size=\"11\">" << labels[i]
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace semg::bench
