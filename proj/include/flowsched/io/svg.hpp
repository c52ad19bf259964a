#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "flowsched/io/csv.hpp"
#include "flowsched/poa_study.hpp"
#include "flowsched/regret_harness.hpp"

namespace flowsched::io {

namespace detail {

inline constexpr double kWidth = 640.0;
inline constexpr double kHeight = 400.0;
inline constexpr double kMargin = 50.0;
inline const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

inline std::string num(double x) { return format_double(std::round(x * 100.0) / 100.0); }

inline std::string frame(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                  num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\">" + title + "</text>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" + xlabel +
       "</text>\n";
  s += "<text x=\"14\" y=\"" + num(kHeight / 2) + "\" transform=\"rotate(-90 14 " + num(kHeight / 2) +
       ")\" text-anchor=\"middle\">" + ylabel + "</text>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" + num(kWidth - kMargin) +
       "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) + "\" y2=\"" +
       num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  return s;
}

}  // namespace detail

// Side-by-side bars of the ratio fraction per bin, one color per order.
inline std::string histogram_svg(const std::vector<HistogramBin>& bins) {
  using namespace detail;
  std::map<int, std::vector<const HistogramBin*>> by_order;
  std::map<int, std::size_t> totals;
  for (const auto& b : bins) {
    by_order[b.order].push_back(&b);
    totals[b.order] += b.count;
  }
  std::string s = frame("price of anarchy", "ratio bin (last bin is overflow)", "fraction of instances");
  if (by_order.empty()) return s + "</svg>\n";
  const std::size_t nbins = by_order.begin()->second.size();
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const double slot = plot_w / static_cast<double>(nbins);
  const double bar = slot / static_cast<double>(by_order.size() + 1);
  std::size_t series = 0;
  for (const auto& [order, list] : by_order) {
    const double total = std::max<double>(1.0, static_cast<double>(totals[order]));
    for (std::size_t i = 0; i < list.size(); ++i) {
      const double h = plot_h * static_cast<double>(list[i]->count) / total;
      const double x = kMargin + i * slot + series * bar;
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(kHeight - kMargin - h) + "\" width=\"" + num(bar) +
           "\" height=\"" + num(h) + "\" fill=\"" + kPalette[series % 6] + "\"/>\n";
    }
    s += "<text x=\"" + num(kWidth - kMargin - 80) + "\" y=\"" + num(kMargin + 15 * series) + "\" fill=\"" +
         kPalette[series % 6] + "\">" + (order == 0 ? std::string("pooled") : "order " + std::to_string(order)) +
         "</text>\n";
    ++series;
  }
  for (std::size_t i = 0; i < nbins; i += std::max<std::size_t>(1, nbins / 8)) {
    s += "<text x=\"" + num(kMargin + i * slot) + "\" y=\"" + num(kHeight - kMargin + 15) + "\">" +
         num(by_order.begin()->second[i]->low) + "</text>\n";
  }
  return s + "</svg>\n";
}

// Mean regret / ln T against log T, one polyline per G.
inline std::string regret_svg(const std::vector<RegretAggregate>& aggregates) {
  using namespace detail;
  std::string s = frame("regret growth", "ln T", "mean regret / ln T");
  std::map<double, std::vector<const RegretAggregate*>> by_g;
  double max_log = 1.0;
  double max_y = 1.0;
  for (const auto& a : aggregates) {
    if (a.t < 2) continue;
    by_g[a.g].push_back(&a);
    max_log = std::max(max_log, std::log(static_cast<double>(a.t)));
    max_y = std::max(max_y, a.mean_over_log);
  }
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  std::size_t series = 0;
  for (const auto& [g, list] : by_g) {
    std::string pts;
    for (const auto* a : list) {
      const double x = kMargin + plot_w * std::log(static_cast<double>(a->t)) / max_log;
      const double y = kHeight - kMargin - plot_h * a->mean_over_log / max_y;
      pts += num(x) + "," + num(y) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[series % 6]) + "\" points=\"" + pts + "\"/>\n";
    s += "<text x=\"" + num(kMargin + 10) + "\" y=\"" + num(kMargin + 15 * series) + "\" fill=\"" +
         kPalette[series % 6] + "\">G = " + format_double(g) + "</text>\n";
    ++series;
  }
  s += "<text x=\"" + num(kMargin - 5) + "\" y=\"" + num(kMargin) + "\" text-anchor=\"end\">" + num(max_y) +
       "</text>\n";
  return s + "</svg>\n";
}

}  // namespace flowsched::io
