#include "sastep/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace sastep {

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    const auto probe = std::filesystem::path(dir) / ".write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw std::runtime_error("output directory '" + dir + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::string format_real(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string results_csv(const ResultFrame& frame) {
    if (frame.rows.empty()) throw std::invalid_argument("refusing to write an empty metric set");
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : frame.rows)
        out += std::to_string(r.step) + "," + r.metric + "," + format_real(r.value) + "," + r.algo + "," +
               r.policy + "," + std::to_string(r.seed) + "\n";
    return out;
}

namespace {

std::string px(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '<') out += "&lt;";
        else if (ch == '>') out += "&gt;";
        else if (ch == '&') out += "&amp;";
        else out += ch;
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 12) {
    return "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\" font-family=\"sans-serif\">" + escape(s) + "</text>\n";
}

}  // namespace

std::string curves_svg(const ResultFrame& frame, const std::string& metric, const std::string& title) {
    const std::string key = metric + "_mean";
    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    double x_min = INFINITY, x_max = -INFINITY, y_min = INFINITY, y_max = -INFINITY;
    for (const auto& r : frame.rows) {
        if (r.metric != key || !(r.value > 0.0)) continue;
        const double y = std::log10(r.value);
        curves[r.algo + "+" + r.policy].emplace_back(static_cast<double>(r.step), y);
        x_min = std::min(x_min, static_cast<double>(r.step));
        x_max = std::max(x_max, static_cast<double>(r.step));
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
    }
    if (curves.empty()) throw std::invalid_argument("no positive '" + key + "' rows to plot");
    y_min = std::floor(y_min);
    y_max = std::ceil(y_max);
    if (y_max <= y_min) y_max = y_min + 1.0;
    if (x_max <= x_min) x_max = x_min + 1.0;

    const double W = 720, H = 440, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
    auto sy = [&](double y) { return top + (y_max - y) / (y_max - y_min) * ph; };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(W) + "\" height=\"" + px(H) +
                    "\" viewBox=\"0 0 " + px(W) + " " + px(H) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += text(W / 2 - right / 2 + left / 2, 22, title, "middle", 14);
    s += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(pw) + "\" height=\"" + px(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(y_min); d <= static_cast<int>(y_max); ++d) {
        const double y = sy(d);
        s += "<line x1=\"" + px(left) + "\" y1=\"" + px(y) + "\" x2=\"" + px(left + pw) + "\" y2=\"" + px(y) +
             "\" stroke=\"#dddddd\"/>\n";
        s += text(left - 8, y + 4, "1e" + std::to_string(d), "end", 11);
    }
    for (int k = 0; k <= 4; ++k) {
        const double x = x_min + (x_max - x_min) * k / 4.0;
        s += text(sx(x), top + ph + 18, std::to_string(static_cast<long long>(std::llround(x))), "middle", 11);
    }
    s += text(left + pw / 2, H - 10, "iteration", "middle", 12);
    s += text(left - 52, top - 12, "L2 error (log)", "start", 12);

    int k = 0;
    for (const auto& [label, pts] : curves) {
        const char* colour = kPalette[k % 8];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            s += (i ? " " : "") + px(sx(pts[i].first)) + "," + px(sy(pts[i].second));
        s += "\"/>\n";
        const double ly = top + 16 + 20 * k;
        s += "<line x1=\"" + px(left + pw + 12) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" + px(left + pw + 36) +
             "\" y2=\"" + px(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        s += text(left + pw + 42, ly, label, "start", 12);
        ++k;
    }
    s += "</svg>\n";
    return s;
}

std::string maps_svg(const std::vector<CellMap>& panels) {
    if (panels.empty()) throw std::invalid_argument("no map panels");
    const double cell = 34, margin = 60, gap = 40, title_h = 30;
    double width = margin, height = 0;
    for (const auto& p : panels) {
        if (p.rows < 1 || p.cols < 1 || p.values.size() != static_cast<std::size_t>(p.rows * p.cols) ||
            p.labels.size() != p.values.size())
            throw std::invalid_argument("malformed map panel '" + p.title + "'");
        width += p.cols * cell + gap + margin;
        height = std::max(height, p.rows * cell + title_h + margin + 20);
    }
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" +
                    px(height) + "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    double x0 = margin;
    for (const auto& p : panels) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < p.values.size(); ++i)
            if (!p.labels[i].empty()) {
                lo = std::min(lo, p.values[i]);
                hi = std::max(hi, p.values[i]);
            }
        s += text(x0 + p.cols * cell / 2, title_h - 8, p.title, "middle", 13);
        for (int r = 0; r < p.rows; ++r)
            for (int c = 0; c < p.cols; ++c) {
                const std::size_t i = static_cast<std::size_t>(r * p.cols + c);
                const double x = x0 + c * cell, y = title_h + (p.rows - 1 - r) * cell;
                std::string fill = "#f4f4f4";
                if (!p.labels[i].empty()) {
                    if (p.binary) {
                        fill = p.values[i] > 0.5 ? "#4a7bd0" : "#d9534f";
                    } else {
                        const double t = hi > lo ? (p.values[i] - lo) / (hi - lo) : 0.5;
                        char buf[16];
                        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 - 150 * t),
                                      static_cast<int>(245 - 120 * t), static_cast<int>(200 + 40 * t));
                        fill = buf;
                    }
                }
                s += "<rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(cell) + "\" height=\"" +
                     px(cell) + "\" fill=\"" + fill + "\" stroke=\"white\"/>\n";
                if (!p.labels[i].empty()) s += text(x + cell / 2, y + cell / 2 + 4, p.labels[i], "middle", 10);
            }
        for (int c = 0; c < p.cols && c < static_cast<int>(p.x_ticks.size()); ++c)
            s += text(x0 + c * cell + cell / 2, title_h + p.rows * cell + 14, p.x_ticks[c], "middle", 10);
        for (int r = 0; r < p.rows && r < static_cast<int>(p.y_ticks.size()); ++r)
            s += text(x0 - 6, title_h + (p.rows - 1 - r) * cell + cell / 2 + 4, p.y_ticks[r], "end", 10);
        s += text(x0 + p.cols * cell / 2, title_h + p.rows * cell + 32, p.x_label, "middle", 11);
        s += text(x0 - 40, title_h - 8, p.y_label, "start", 11);
        x0 += p.cols * cell + gap + margin;
    }
    s += "</svg>\n";
    return s;
}

CellMap placement_control_map(const LobModel& model, const std::vector<int>& control_t0, int q_opp,
                              const std::string& title) {
    const PlacementIndex index(model);
    const int nb = model.grid.q_before_max + 1, na = model.grid.q_after_max + 1;
    CellMap m;
    m.title = title;
    m.x_label = "Q_same";
    m.y_label = "Q_before";
    m.rows = nb;
    m.cols = nb + na - 1;
    m.binary = true;
    m.values.assign(static_cast<std::size_t>(m.rows * m.cols), 0.0);
    m.labels.assign(m.values.size(), "");
    for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a) {
            LobState s;
            s.q_before = b;
            s.q_after = a;
            s.q_opp = q_opp;
            const int ctrl = control_t0.at(index.cell(0, s));
            const std::size_t i = static_cast<std::size_t>(b * m.cols + (a + b));
            m.values[i] = ctrl;
            m.labels[i] = std::to_string(ctrl);
        }
    for (int c = 0; c < m.cols; ++c) m.x_ticks.push_back(std::to_string(c));
    for (int r = 0; r < m.rows; ++r) m.y_ticks.push_back(std::to_string(r));
    return m;
}

CellMap execution_value_map(const ExecModel& model, const std::vector<double>& values,
                            const std::string& title) {
    if (values.size() != model.n_states()) throw std::invalid_argument("value table size mismatch");
    CellMap m;
    m.title = title;
    m.x_label = "inventory";
    m.y_label = "time step";
    m.rows = model.k_T + 1;
    m.cols = model.k_q + 1;
    for (int t = 0; t <= model.k_T; ++t)
        for (int j = 0; j <= model.k_q; ++j) {
            const double v = values[model.index(t, j)];
            m.values.push_back(v);
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            m.labels.push_back(buf);
        }
    for (int j = 0; j <= model.k_q; ++j) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.1f", model.inventory(j));
        m.x_ticks.push_back(buf);
    }
    for (int t = 0; t <= model.k_T; ++t) m.y_ticks.push_back(std::to_string(t));
    return m;
}

std::string drift_reference_csv(const ReferenceTable& ref) {
    std::string out = "t,value\n";
    for (std::size_t t = 0; t < ref.values.size(); ++t)
        out += std::to_string(t) + "," + format_real(ref.values[t]) + "\n";
    return out;
}

std::string placement_reference_csv(const LobModel& model, const ReferenceTable& ref) {
    const PlacementIndex index(model);
    std::string out = "t,q_before,q_after,q_opp,value_cross,value_stay,control\n";
    for (std::size_t c = 0; c < index.n_cells(); ++c) {
        const auto [t, s] = index.decode_cell(c);
        out += std::to_string(t) + "," + std::to_string(s.q_before) + "," + std::to_string(s.q_after) + "," +
               std::to_string(s.q_opp) + "," + format_real(ref.values[2 * c]) + "," +
               format_real(ref.values[2 * c + 1]) + "," + std::to_string(ref.control[c]) + "\n";
    }
    return out;
}

std::string execution_reference_csv(const ExecModel& model, const ReferenceTable& ref) {
    std::string out = "t,q,value,next_q\n";
    for (int t = 0; t <= model.k_T; ++t)
        for (int j = 0; j <= model.k_q; ++j) {
            const StateIndex z = model.index(t, j);
            out += std::to_string(t) + "," + format_real(model.inventory(j)) + "," + format_real(ref.values[z]) + ",";
            out += t < model.k_T ? format_real(model.inventory(ref.control[z])) : std::string();
            out += "\n";
        }
    return out;
}

std::string theorem1_csv(const Theorem1Check& check) {
    std::string out = "n,simulated,standard_error,bound\n";
    for (std::size_t n = 0; n < check.simulated.size(); ++n)
        out += std::to_string(n + 1) + "," + format_real(check.simulated[n]) + "," +
               format_real(check.standard_error[n]) + "," + format_real(check.bound[n]) + "\n";
    return out;
}

}  // namespace sastep
