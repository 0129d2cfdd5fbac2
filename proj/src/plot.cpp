#include "batchband/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "batchband/csv.hpp"
#include "batchband/error.hpp"

namespace batchband {

namespace {

struct Endpoint {
  PlotPoint point;
  std::size_t t = 0;
};

std::string field_of(const std::string& cell, std::string_view name, std::size_t line) {
  for (const auto& part : split(cell, ';')) {
    const auto eq = part.find('=');
    if (eq != std::string::npos && std::string_view(part).substr(0, eq) == name) {
      return part.substr(eq + 1);
    }
  }
  throw DataError("line " + std::to_string(line) + ": cell key lacks '" + std::string(name) + "'");
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 130.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr double kZ = 1.96;

}  // namespace

std::vector<PlotPoint> read_curve_endpoints(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("line 1: empty curves file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "cell,t,mean,stderr") throw DataError("line 1: expected header cell,t,mean,stderr");

  std::vector<std::string> order;
  std::map<std::string, Endpoint> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const auto fail = [&](const std::string& what) {
      return DataError("line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 4) throw fail("expected 4 fields");
    std::size_t t = 0;
    double mean = 0.0;
    double se = 0.0;
    if (!parse_size(fields[1], t) || t == 0) throw fail("bad t");
    if (!parse_double(fields[2], mean)) throw fail("bad mean");
    if (!parse_double(fields[3], se) || se < 0.0) throw fail("bad stderr");

    auto it = cells.find(fields[0]);
    if (it == cells.end()) {
      Endpoint e;
      e.point.env = field_of(fields[0], "env", line_no);
      e.point.policy = field_of(fields[0], "policy", line_no);
      std::size_t b = 0;
      if (!parse_size(field_of(fields[0], "b", line_no), b) || b == 0) {
        throw fail("bad batch size in cell key");
      }
      e.point.b = static_cast<Timestep>(b);
      it = cells.emplace(fields[0], e).first;
      order.push_back(fields[0]);
    }
    if (t >= it->second.t) {
      it->second.t = t;
      it->second.point.mean = mean;
      it->second.point.stderr_ = se;
    }
  }
  if (cells.empty()) throw DataError("line " + std::to_string(line_no) + ": no data rows");

  std::vector<PlotPoint> points;
  for (const auto& key : order) points.push_back(cells.at(key).point);
  return points;
}

void write_svg(std::ostream& out, const std::vector<PlotPoint>& points) {
  std::vector<std::string> envs;
  for (const auto& p : points) {
    if (std::find(envs.begin(), envs.end(), p.env) == envs.end()) envs.push_back(p.env);
  }
  const double total_height = kHeight * static_cast<double>(std::max<std::size_t>(envs.size(), 1));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(total_height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";

  for (std::size_t e = 0; e < envs.size(); ++e) {
    std::vector<PlotPoint> mine;
    std::vector<std::string> policies;
    std::set<Timestep> bs;
    double y_max = 0.0;
    for (const auto& p : points) {
      if (p.env != envs[e]) continue;
      mine.push_back(p);
      bs.insert(p.b);
      y_max = std::max(y_max, p.mean + kZ * p.stderr_);
      if (std::find(policies.begin(), policies.end(), p.policy) == policies.end()) {
        policies.push_back(p.policy);
      }
    }
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.1;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double lo = std::log2(static_cast<double>(*bs.begin()));
    const double hi = std::log2(static_cast<double>(*bs.rbegin()));
    const auto x_of = [&](Timestep b) {
      if (hi == lo) return kLeft + plot_w / 2.0;
      return kLeft + (std::log2(static_cast<double>(b)) - lo) / (hi - lo) * plot_w;
    };
    const auto y_of = [&](double v) { return kTop + plot_h - v / y_max * plot_h; };

    out << "<g class=\"chart\" transform=\"translate(0," << num(kHeight * static_cast<double>(e))
        << ")\">\n";
    out << "  <text x=\"" << num(kLeft + plot_w / 2.0) << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-size=\"14\">" << escape(envs[e]) << "</text>\n";
    out << "  <line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
        << num(kLeft + plot_w) << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    for (Timestep b : bs) {
      const double x = x_of(b);
      out << "  <line x1=\"" << num(x) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n";
      out << "  <text x=\"" << num(x) << "\" y=\"" << num(kTop + plot_h + 18)
          << "\" text-anchor=\"middle\">" << b << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
      const double v = y_max * i / 4.0;
      const double y = y_of(v);
      out << "  <line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
          << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
      out << "  <text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
    out << "  <text class=\"x-label\" x=\"" << num(kLeft + plot_w / 2.0) << "\" y=\""
        << num(kHeight - 12) << "\" text-anchor=\"middle\">batch size b</text>\n";
    out << "  <text class=\"y-label\" x=\"16\" y=\"" << num(kTop + plot_h / 2.0)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(kTop + plot_h / 2.0)
        << ")\">mean final regret</text>\n";

    for (std::size_t s = 0; s < policies.size(); ++s) {
      const char* color = kColors[s % std::size(kColors)];
      std::vector<PlotPoint> series;
      for (const auto& p : mine) {
        if (p.policy == policies[s]) series.push_back(p);
      }
      std::sort(series.begin(), series.end(),
                [](const PlotPoint& a, const PlotPoint& b) { return a.b < b.b; });
      out << "  <g class=\"series\" data-policy=\"" << escape(policies[s]) << "\">\n";
      out << "    <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < series.size(); ++i) {
        if (i > 0) out << ' ';
        out << num(x_of(series[i].b)) << ',' << num(y_of(series[i].mean));
      }
      out << "\"/>\n";
      for (const auto& p : series) {
        const double x = x_of(p.b);
        const double y0 = y_of(std::max(0.0, p.mean - kZ * p.stderr_));
        const double y1 = y_of(p.mean + kZ * p.stderr_);
        out << "    <line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x)
            << "\" y2=\"" << num(y1) << "\" stroke=\"" << color << "\"/>\n";
        out << "    <circle cx=\"" << num(x) << "\" cy=\"" << num(y_of(p.mean))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
      out << "  </g>\n";
      const double ly = kTop + 10.0 + 18.0 * static_cast<double>(s);
      out << "  <line x1=\"" << num(kWidth - kRight + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
          << num(kWidth - kRight + 35) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
      out << "  <text x=\"" << num(kWidth - kRight + 40) << "\" y=\"" << num(ly + 4) << "\">"
          << escape(policies[s]) << "</text>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace batchband
