#pragma once

#include <algorithm>
#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "wellness/cooccur.hpp"
#include "wellness/csv_io.hpp"
#include "wellness/interaction.hpp"
#include "wellness/trends.hpp"

namespace wellness {

namespace svg_detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
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

inline void open_svg(std::ostringstream& out, double width, double height) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_num(width)
        << "\" height=\"" << format_num(height) << "\" viewBox=\"0 0 " << format_num(width) << ' '
        << format_num(height) << "\">\n";
}

inline void text(std::ostringstream& out, double x, double y, const std::string& s,
                 int font_size = 11, const char* anchor = "start") {
    out << "<text x=\"" << format_num(x) << "\" y=\"" << format_num(y)
        << "\" font-family=\"monospace\" font-size=\"" << font_size << "\" text-anchor=\"" << anchor
        << "\">" << xml_escape(s) << "</text>\n";
}

inline void line(std::ostringstream& out, double x1, double y1, double x2, double y2) {
    out << "<line x1=\"" << format_num(x1) << "\" y1=\"" << format_num(y1) << "\" x2=\""
        << format_num(x2) << "\" y2=\"" << format_num(y2)
        << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
}

} // namespace svg_detail

// Activity x time-bin grid; one rect per cell whose fill-opacity equals the
// cell value, so the image parses back to the data exactly.
inline std::string svg_heatmap(const TemporalHeatmap& hm) {
    using namespace svg_detail;
    const double cell_w = 14.0, cell_h = 22.0;
    const double left = 130.0, top = 34.0;
    const std::size_t bins = hm.bin_count();
    const double width = left + cell_w * static_cast<double>(std::max<std::size_t>(bins, 1)) + 20.0;
    const double height = top + cell_h * static_cast<double>(hm.activities.size()) + 40.0;
    std::ostringstream out;
    open_svg(out, width, height);
    text(out, left, 16.0, hm.person_id + " " + hm.date, 12);
    for (std::size_t r = 0; r < hm.activities.size(); ++r) {
        text(out, left - 8.0, top + cell_h * (static_cast<double>(r) + 0.7), hm.activities[r], 11,
             "end");
        for (std::size_t b = 0; b < bins; ++b) {
            out << "<rect x=\"" << format_num(left + cell_w * static_cast<double>(b)) << "\" y=\""
                << format_num(top + cell_h * static_cast<double>(r)) << "\" width=\""
                << format_num(cell_w) << "\" height=\"" << format_num(cell_h)
                << "\" fill=\"#1f4e8c\" fill-opacity=\"" << format_num(hm.cells[r][b]) << "\"/>\n";
        }
    }
    // hour ticks along the bottom
    const double bottom = top + cell_h * static_cast<double>(hm.activities.size());
    for (std::size_t b = 0; b <= bins; b += std::max<std::size_t>(1, 3600 / std::max(1, static_cast<int>(hm.bin_width_s)))) {
        const double x = left + cell_w * static_cast<double>(b);
        line(out, x, bottom, x, bottom + 5.0);
        const int hour = static_cast<int>((hm.start_s + static_cast<double>(b) * hm.bin_width_s) / 3600.0);
        text(out, x, bottom + 18.0, std::to_string(hour) + "h", 10, "middle");
    }
    out << "</svg>\n";
    return out.str();
}

inline std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                                 const std::vector<double>& values) {
    using namespace svg_detail;
    const double bar_w = 18.0, plot_h = 160.0;
    const double left = 50.0, top = 30.0;
    const double width = left + bar_w * static_cast<double>(std::max<std::size_t>(values.size(), 1)) + 20.0;
    const double height = top + plot_h + 40.0;
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    std::ostringstream out;
    open_svg(out, width, height);
    text(out, left, 16.0, title, 12);
    line(out, left, top + plot_h, left + bar_w * static_cast<double>(values.size()), top + plot_h);
    text(out, left - 6.0, top + 10.0, format_num(vmax), 10, "end");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double h = vmax > 0.0 ? plot_h * values[i] / vmax : 0.0;
        out << "<rect x=\"" << format_num(left + bar_w * static_cast<double>(i) + 2.0) << "\" y=\""
            << format_num(top + plot_h - h) << "\" width=\"" << format_num(bar_w - 4.0)
            << "\" height=\"" << format_num(h) << "\" fill=\"#3572b0\"/>\n";
        if (i < labels.size())
            text(out, left + bar_w * (static_cast<double>(i) + 0.5), top + plot_h + 16.0, labels[i],
                 9, "middle");
    }
    out << "</svg>\n";
    return out.str();
}

inline std::string svg_line_chart(const std::string& title, const std::vector<std::string>& dates,
                                  const std::vector<double>& values) {
    using namespace svg_detail;
    const double plot_w = 420.0, plot_h = 160.0;
    const double left = 60.0, top = 30.0;
    const double width = left + plot_w + 20.0;
    const double height = top + plot_h + 50.0;
    double vmin = 0.0, vmax = 0.0;
    for (double v : values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax == vmin) vmax = vmin + 1.0;
    std::ostringstream out;
    open_svg(out, width, height);
    text(out, left, 16.0, title, 12);
    line(out, left, top, left, top + plot_h);
    line(out, left, top + plot_h, left + plot_w, top + plot_h);
    text(out, left - 6.0, top + 10.0, format_num(vmax), 10, "end");
    text(out, left - 6.0, top + plot_h, format_num(vmin), 10, "end");
    const std::size_t n = values.size();
    if (n > 0) {
        out << "<polyline fill=\"none\" stroke=\"#b03535\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            const double x = left + (n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1)) * plot_w;
            const double y = top + plot_h - (values[i] - vmin) / (vmax - vmin) * plot_h;
            out << (i ? " " : "") << format_num(x) << ',' << format_num(y);
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < n && i < dates.size(); ++i) {
            const double x = left + (n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1)) * plot_w;
            text(out, x, top + plot_h + 16.0, dates[i].size() >= 5 ? dates[i].substr(5) : dates[i],
                 8, "middle");
        }
    }
    out << "</svg>\n";
    return out.str();
}

// Correlation matrix as a signed grid: blue for positive, red for negative,
// opacity proportional to |eta|.
inline std::string svg_matrix(const CorrelationMatrix& m) {
    using namespace svg_detail;
    const double cell = 26.0;
    const double left = 130.0, top = 130.0;
    const std::size_t a = m.activities.size();
    const double width = left + cell * static_cast<double>(a) + 20.0;
    const double height = top + cell * static_cast<double>(a) + 20.0;
    std::ostringstream out;
    open_svg(out, width, height);
    for (std::size_t i = 0; i < a; ++i) {
        text(out, left - 8.0, top + cell * (static_cast<double>(i) + 0.65), m.activities[i], 10, "end");
        out << "<g transform=\"rotate(-60 " << format_num(left + cell * (static_cast<double>(i) + 0.5))
            << ' ' << format_num(top - 8.0) << ")\">\n";
        text(out, left + cell * (static_cast<double>(i) + 0.5), top - 8.0, m.activities[i], 10);
        out << "</g>\n";
        for (std::size_t j = 0; j < a; ++j) {
            const double v = m.eta[i][j];
            out << "<rect x=\"" << format_num(left + cell * static_cast<double>(j)) << "\" y=\""
                << format_num(top + cell * static_cast<double>(i)) << "\" width=\""
                << format_num(cell) << "\" height=\"" << format_num(cell) << "\" fill=\""
                << (v < 0.0 ? "#c03030" : "#1f4e8c") << "\" fill-opacity=\""
                << format_num(std::min(1.0, std::abs(v))) << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

namespace svg_detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace svg_detail

// Graphviz DOT text; nodes labeled "id\ncategory", edges "relation (weight)".
inline std::string dot_scene_graph(const SceneGraph& graph) {
    using svg_detail::dot_escape;
    std::ostringstream out;
    out << "digraph scene {\n";
    out << "  rankdir=LR;\n";
    for (const auto& [id, node] : graph.nodes) {
        out << "  \"" << dot_escape(id) << "\" [shape="
            << (node.kind == NodeKind::person ? "ellipse" : "box") << ", label=\""
            << dot_escape(id) << "\\n" << dot_escape(node.category);
        if (!node.attributes.empty()) {
            out << "\\n[";
            bool first = true;
            for (const auto& attr : node.attributes) {
                out << (first ? "" : ", ") << dot_escape(attr);
                first = false;
            }
            out << "]";
        }
        out << "\"];\n";
    }
    for (const auto& e : graph.edges) {
        out << "  \"" << dot_escape(e.src) << "\" -> \"" << dot_escape(e.dst) << "\" [label=\""
            << dot_escape(e.relation) << " (" << format_num(e.weight) << ")\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace wellness
