#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "knodest/bench/report.hpp"

namespace knodest::bench {

namespace fs = std::filesystem;

namespace {

// Geometry shared by both chart kinds.
constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 46.0;
constexpr double kBottom = 96.0;

struct MethodSeries {
    std::string name;
    std::vector<double> values;  // per-seed MSEs, non-diverged
    AggregateStats stats;
};

struct LogScale {
    double lo, hi;  // log10 bounds
    double map(double v) const {
        const double f = (std::log10(v) - lo) / (hi - lo);
        return kTop + (1.0 - f) * (kHeight - kTop - kBottom);
    }
};

LogScale make_scale(double vmin, double vmax) {
    LogScale s;
    s.lo = std::log10(vmin) - 0.3;
    s.hi = std::log10(vmax) + 0.3;
    if (s.hi - s.lo < 1.0) {
        const double mid = 0.5 * (s.lo + s.hi);
        s.lo = mid - 0.5;
        s.hi = mid + 0.5;
    }
    return s;
}

class Svg {
  public:
    explicit Svg(const std::string& path) : f_(std::fopen(path.c_str(), "w")), path_(path) {
        if (!f_) throw Error("emit_plots: cannot open " + path);
        std::fprintf(f_, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        std::fprintf(f_,
                     "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                     "viewBox=\"0 0 %.0f %.0f\">\n",
                     kWidth, kHeight, kWidth, kHeight);
        std::fprintf(f_, "<rect x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n",
                     kWidth, kHeight);
    }
    ~Svg() {
        if (f_) std::fclose(f_);
    }

    void comment(const std::string& text) { std::fprintf(f_, "<!-- %s -->\n", text.c_str()); }

    void line(double x1, double y1, double x2, double y2, const char* stroke,
              double width = 1.0) {
        std::fprintf(f_,
                     "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                     "stroke-width=\"%.1f\"/>\n",
                     x1, y1, x2, y2, stroke, width);
    }

    void rect(double x, double y, double w, double h, const char* fill, const char* stroke) {
        std::fprintf(f_,
                     "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" "
                     "stroke=\"%s\"/>\n",
                     x, y, w, h, fill, stroke);
    }

    void text(double x, double y, const std::string& s, int size, const char* anchor,
              double rotate = 0.0) {
        if (rotate != 0.0) {
            std::fprintf(f_,
                         "<text x=\"%.2f\" y=\"%.2f\" font-size=\"%d\" font-family=\"sans-serif\" "
                         "text-anchor=\"%s\" transform=\"rotate(%.0f %.2f %.2f)\">%s</text>\n",
                         x, y, size, anchor, rotate, x, y, s.c_str());
        } else {
            std::fprintf(f_,
                         "<text x=\"%.2f\" y=\"%.2f\" font-size=\"%d\" font-family=\"sans-serif\" "
                         "text-anchor=\"%s\">%s</text>\n",
                         x, y, size, anchor, s.c_str());
        }
    }

    void finish() {
        std::fprintf(f_, "</svg>\n");
        if (std::ferror(f_)) throw Error("emit_plots: write failed for " + path_);
        std::fclose(f_);
        f_ = nullptr;
    }

  private:
    std::FILE* f_;
    std::string path_;
};

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void draw_frame(Svg& svg, const LogScale& scale, const std::vector<MethodSeries>& series,
                const std::string& title) {
    const double plot_bottom = kHeight - kBottom;
    svg.text(kWidth / 2.0, 24.0, title, 15, "middle");
    svg.line(kLeft, kTop, kLeft, plot_bottom, "black");
    svg.line(kLeft, plot_bottom, kWidth - kRight, plot_bottom, "black");

    for (int e = static_cast<int>(std::ceil(scale.lo)); e <= std::floor(scale.hi); ++e) {
        const double v = std::pow(10.0, e);
        const double y = scale.map(v);
        svg.line(kLeft - 4.0, y, kLeft, y, "black");
        svg.line(kLeft, y, kWidth - kRight, y, "#dddddd");
        svg.text(kLeft - 8.0, y + 4.0, "1e" + std::to_string(e), 11, "end");
    }
    svg.text(16.0, (kTop + plot_bottom) / 2.0, "MSE", 12, "middle", -90.0);

    const double span = kWidth - kLeft - kRight;
    const double slot = span / series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double cx = kLeft + (i + 0.5) * slot;
        svg.text(cx, plot_bottom + 14.0, series[i].name, 10, "end", -30.0);
    }
}

std::map<std::string, std::vector<MethodSeries>> group_by_scenario(
    const std::vector<RunResult>& results) {
    std::map<std::string, std::map<std::string, std::vector<double>>> grouped;
    for (const auto& r : results) {
        if (!r.diverged) grouped[r.scenario_id][r.method].push_back(r.mse);
    }
    std::map<std::string, std::vector<MethodSeries>> out;
    for (auto& [scenario, per_method] : grouped) {
        std::vector<MethodSeries> series;
        for (auto& [name, values] : per_method) {
            MethodSeries ms;
            ms.name = name;
            ms.stats = aggregate(values);
            ms.values = std::move(values);
            series.push_back(std::move(ms));
        }
        std::sort(series.begin(), series.end(),
                  [](const MethodSeries& a, const MethodSeries& b) {
                      auto rank = [](const std::string& n) {
                          const auto& ms = all_methods();
                          for (std::size_t i = 0; i < ms.size(); ++i) {
                              if (ms[i].name == n) return i;
                          }
                          return ms.size();
                      };
                      return rank(a.name) < rank(b.name);
                  });
        out[scenario] = std::move(series);
    }
    return out;
}

void emit_bar_chart(const std::string& path, const std::string& scenario,
                    const std::vector<MethodSeries>& series) {
    double vmin = 1e300, vmax = 0.0;
    for (const auto& s : series) {
        for (double v : s.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    const LogScale scale = make_scale(vmin, vmax);

    Svg svg(path);
    svg.comment("knodest-plot v1 kind=bars scenario=" + scenario);
    for (const auto& s : series) {
        svg.comment("mean method=" + s.name + " value=" + fmt(s.stats.mean));
        svg.comment("median method=" + s.name + " value=" + fmt(s.stats.median));
    }
    draw_frame(svg, scale, series, scenario + ": mean MSE with sample std (" +
                                       std::to_string(series.front().stats.count) + " runs)");

    const double plot_bottom = kHeight - kBottom;
    const double span = kWidth - kLeft - kRight;
    const double slot = span / series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const double cx = kLeft + (i + 0.5) * slot;
        const double w = slot * 0.55;
        const double y = scale.map(s.stats.mean);
        svg.rect(cx - w / 2.0, y, w, plot_bottom - y, "#7aa6d9", "#2b5f9e");
        const double hi = scale.map(s.stats.mean + s.stats.stddev);
        const double lo_val = s.stats.mean - s.stats.stddev;
        const double lo = lo_val > 0.0 ? scale.map(lo_val) : plot_bottom;
        svg.line(cx, hi, cx, lo, "black", 1.2);
        svg.line(cx - 5.0, hi, cx + 5.0, hi, "black", 1.2);
        svg.line(cx - 5.0, lo, cx + 5.0, lo, "black", 1.2);
    }
    svg.finish();
}

void emit_box_plot(const std::string& path, const std::string& scenario,
                   const std::vector<MethodSeries>& series) {
    double vmin = 1e300, vmax = 0.0;
    for (const auto& s : series) {
        for (double v : s.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    const LogScale scale = make_scale(vmin, vmax);

    Svg svg(path);
    svg.comment("knodest-plot v1 kind=box scenario=" + scenario);
    for (const auto& s : series) {
        svg.comment("median method=" + s.name + " value=" + fmt(s.stats.median));
    }
    draw_frame(svg, scale, series, scenario + ": MSE distribution across seeds");

    const double span = kWidth - kLeft - kRight;
    const double slot = span / series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        auto values = series[i].values;
        std::sort(values.begin(), values.end());
        const int count = static_cast<int>(values.size());
        auto median_of = [&](int first, int last) {  // inclusive range
            const int len = last - first + 1;
            const int mid = first + len / 2;
            return len % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
        };
        const double med = median_of(0, count - 1);
        const double q1 = count > 1 ? median_of(0, count / 2 - 1) : values[0];
        const double q3 = count > 1 ? median_of(count - count / 2, count - 1) : values[0];

        const double cx = kLeft + (i + 0.5) * slot;
        const double w = slot * 0.5;
        const double y_med = scale.map(med);
        const double y_q1 = scale.map(q1);
        const double y_q3 = scale.map(q3);
        const double y_min = scale.map(values.front());
        const double y_max = scale.map(values.back());

        svg.line(cx, y_min, cx, y_q1, "black");
        svg.line(cx, y_q3, cx, y_max, "black");
        svg.line(cx - w / 4.0, y_min, cx + w / 4.0, y_min, "black");
        svg.line(cx - w / 4.0, y_max, cx + w / 4.0, y_max, "black");
        svg.rect(cx - w / 2.0, y_q3, w, y_q1 - y_q3, "#d9c27a", "#8a6d1f");
        svg.line(cx - w / 2.0, y_med, cx + w / 2.0, y_med, "#a02020", 1.6);
    }
    svg.finish();
}

}  // namespace

void emit_plots(const std::vector<RunResult>& results, const std::string& out_dir) {
    if (results.empty()) throw Error("emit_plots: no results to plot");
    const auto grouped = group_by_scenario(results);
    if (grouped.empty()) throw Error("emit_plots: every run diverged; nothing to plot");

    const fs::path dir = fs::path(out_dir) / "plots";
    fs::create_directories(dir);
    for (const auto& [scenario, series] : grouped) {
        if (series.empty()) continue;
        emit_bar_chart((dir / ("mse_" + scenario + ".svg")).string(), scenario, series);
        emit_box_plot((dir / ("box_" + scenario + ".svg")).string(), scenario, series);
    }
}

}  // namespace knodest::bench
