#include "gpusched/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gpusched {

namespace {

const char* kPalette[] = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
};

std::string color_for(int task_id)
{
    std::size_t n = sizeof(kPalette) / sizeof(kPalette[0]);
    return kPalette[static_cast<std::size_t>(task_id) % n];
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

struct Interval {
    time_us begin = 0;
    time_us end = 0;
    int actor = 0;   // task id or kServerActor
};

/// Execution intervals per row derived from the event trace.
struct Rows {
    std::vector<std::vector<Interval>> core_rows;   // task + server activity
    std::vector<Interval> gpu_row;
};

Rows build_rows(const SimResult& result)
{
    Rows rows;
    int num_cores = static_cast<int>(result.core_busy.size());
    rows.core_rows.resize(num_cores);

    std::map<int, std::pair<time_us, int>> open;   // core -> (start, actor)
    std::pair<time_us, bool> server_open{0, false};
    std::pair<time_us, bool> gpu_open{0, false};
    int gpu_actor = 0;

    auto close_core = [&](int core, time_us t, int actor) {
        auto it = open.find(core);
        if (it != open.end() && it->second.second == actor) {
            if (t > it->second.first)
                rows.core_rows[core].push_back({it->second.first, t, actor});
            open.erase(it);
        }
    };

    for (const auto& ev : result.trace) {
        switch (ev.kind) {
        case SimEventKind::dispatch:
            close_core(ev.core, ev.time, open.count(ev.core) ? open[ev.core].second : 0);
            open[ev.core] = {ev.time, ev.actor};
            break;
        case SimEventKind::preempt:
        case SimEventKind::job_complete:
            close_core(ev.core, ev.time, ev.actor);
            break;
        case SimEventKind::suspend:
            if (ev.actor == kServerActor) {
                if (server_open.second && result.server_core) {
                    rows.core_rows[*result.server_core].push_back(
                        {server_open.first, ev.time, kServerActor});
                }
                server_open.second = false;
            } else {
                close_core(ev.core, ev.time, ev.actor);
            }
            break;
        case SimEventKind::server_wake:
            server_open = {ev.time, true};
            break;
        case SimEventKind::gpu_start:
            gpu_open = {ev.time, true};
            gpu_actor = ev.actor;
            break;
        case SimEventKind::gpu_finish:
            if (gpu_open.second)
                rows.gpu_row.push_back({gpu_open.first, ev.time, gpu_actor});
            gpu_open.second = false;
            break;
        default:
            break;
        }
    }
    for (auto& [core, st] : open)
        if (result.horizon > st.first)
            rows.core_rows[core].push_back({st.first, result.horizon, st.second});
    if (server_open.second && result.server_core)
        rows.core_rows[*result.server_core].push_back({server_open.first, result.horizon, kServerActor});
    if (gpu_open.second)
        rows.gpu_row.push_back({gpu_open.first, result.horizon, gpu_actor});
    return rows;
}

} // namespace

std::string gantt_svg(const SimResult& result, const std::string& title)
{
    Rows rows = build_rows(result);
    const int num_cores = static_cast<int>(result.core_busy.size());
    const int num_rows = num_cores + 1;

    const double left = 90, top = 50, row_h = 34, row_gap = 10, width = 1000;
    const double height = top + num_rows * (row_h + row_gap) + 40;
    const double span = static_cast<double>(result.horizon);
    auto x_of = [&](time_us t) { return left + (static_cast<double>(t) / span) * (width - left - 20); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<text x=\"" << left << "\" y=\"20\" font-size=\"15\">" << title << "</text>\n";

    for (int r = 0; r < num_rows; r++) {
        double y = top + r * (row_h + row_gap);
        std::string label = r < num_cores ? "core " + std::to_string(r) : "GPU";
        s << "<text x=\"8\" y=\"" << fmt(y + row_h * 0.65) << "\">" << label << "</text>\n";
        s << "<line x1=\"" << left << "\" y1=\"" << fmt(y + row_h) << "\" x2=\"" << width - 20
          << "\" y2=\"" << fmt(y + row_h) << "\" stroke=\"#ccc\"/>\n";

        const auto& intervals = r < num_cores ? rows.core_rows[r] : rows.gpu_row;
        for (const auto& iv : intervals) {
            std::string fill = iv.actor == kServerActor ? "#888888" : color_for(iv.actor);
            s << "<rect x=\"" << fmt(x_of(iv.begin)) << "\" y=\"" << fmt(y + 4) << "\" width=\""
              << fmt(std::max(0.5, x_of(iv.end) - x_of(iv.begin))) << "\" height=\"" << fmt(row_h - 8)
              << "\" fill=\"" << fill << "\"";
            if (iv.actor == kServerActor)
                s << " opacity=\"0.7\"";
            s << "/>\n";
        }
    }

    // Time axis in milliseconds.
    int ticks = 10;
    for (int i = 0; i <= ticks; i++) {
        time_us t = result.horizon * i / ticks;
        double x = x_of(t);
        double y = top + num_rows * (row_h + row_gap);
        s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top - 6) << "\" x2=\"" << fmt(x) << "\" y2=\""
          << fmt(y) << "\" stroke=\"#eee\"/>\n";
        s << "<text x=\"" << fmt(x - 10) << "\" y=\"" << fmt(y + 16) << "\">" << t / 1000 << "ms</text>\n";
    }

    // Legend.
    double lx = left;
    for (const auto& ref : result.task_refs) {
        s << "<rect x=\"" << fmt(lx) << "\" y=\"28\" width=\"12\" height=\"12\" fill=\""
          << color_for(ref.id) << "\"/>\n";
        s << "<text x=\"" << fmt(lx + 16) << "\" y=\"38\">" << ref.id << "</text>\n";
        lx += 52;
    }
    if (result.server_core) {
        s << "<rect x=\"" << fmt(lx) << "\" y=\"28\" width=\"12\" height=\"12\" fill=\"#888888\"/>\n";
        s << "<text x=\"" << fmt(lx + 16) << "\" y=\"38\">server</text>\n";
    }

    s << "</svg>\n";
    return s.str();
}

void write_gantt_svg(const SimResult& result, const std::string& title, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write svg file: " + path);
    out << gantt_svg(result, title);
}

std::string line_chart_svg(const std::vector<ChartSeries>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label)
{
    const double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 60;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& ser : series) {
        for (const auto& [x, y] : ser.points) {
            if (first) {
                xmin = xmax = x;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax == xmin)
        xmax = xmin + 1;
    ymax = std::max(1.0, ymax);

    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<text x=\"" << left << "\" y=\"20\" font-size=\"15\">" << title << "</text>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << width - right << "\" y2=\""
      << fmt(py(0)) << "\" stroke=\"#333\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << left << "\" y2=\"" << top
      << "\" stroke=\"#333\"/>\n";
    s << "<text x=\"" << fmt(width / 2 - 30) << "\" y=\"" << fmt(height - 14) << "\">" << x_label
      << "</text>\n";
    s << "<text x=\"14\" y=\"" << fmt(top - 8) << "\">" << y_label << "</text>\n";

    for (int i = 0; i <= 5; i++) {
        double yv = ymin + (ymax - ymin) * i / 5.0;
        s << "<line x1=\"" << left - 4 << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << width - right
          << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"#eee\"/>\n";
        s << "<text x=\"" << left - 46 << "\" y=\"" << fmt(py(yv) + 4) << "\">" << fmt(yv) << "</text>\n";
    }

    std::size_t idx = 0;
    double ly = top;
    for (const auto& ser : series) {
        std::string color = kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::ostringstream pts;
        for (const auto& [x, y] : ser.points)
            pts << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
          << pts.str() << "\"/>\n";
        for (const auto& [x, y] : ser.points)
            s << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2.5\" fill=\""
              << color << "\"/>\n";
        s << "<rect x=\"" << fmt(width - 190) << "\" y=\"" << fmt(ly) << "\" width=\"12\" height=\"12\" fill=\""
          << color << "\"/>\n";
        s << "<text x=\"" << fmt(width - 172) << "\" y=\"" << fmt(ly + 10) << "\">" << ser.label
          << "</text>\n";
        ly += 18;
        idx++;
    }
    for (double xv : {xmin, xmax}) {
        s << "<text x=\"" << fmt(px(xv) - 8) << "\" y=\"" << fmt(height - bottom + 18) << "\">" << fmt(xv)
          << "</text>\n";
    }

    s << "</svg>\n";
    return s.str();
}

void write_line_chart_svg(const std::vector<ChartSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write svg file: " + path);
    out << line_chart_svg(series, title, x_label, y_label);
}

} // namespace gpusched
