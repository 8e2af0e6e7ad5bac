#include "quadnls/plots.hpp"

#include <cstdio>
#include <sstream>

#include "quadnls/io.hpp"

namespace quadnls {
namespace {

namespace fs = std::filesystem;

std::string first_line(const std::string& text) {
  auto line = text.substr(0, text.find('\n'));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

fs::path sibling(const fs::path& input, const std::string& suffix) {
  return input.parent_path() / (input.stem().string() + suffix);
}

std::string preamble(const std::string& title, const fs::path& png) {
  return "# " + title + "\nset terminal pngcairo size 900,600\nset output '" + png.filename().string() +
         "'\nset datafile separator ','\nset grid\n";
}

fs::path profile_script(const fs::path& csv, const fs::path& out) {
  std::ostringstream s;
  s << preamble("ground-state profiles", sibling(out, ".png")) << "set multiplot layout 1,2\n"
    << "set xlabel 'r'\nset ylabel 'amplitude'\n"
    << "plot '" << csv.filename().string() << "' using 1:2 skip 1 with lines title 'Re u', \\\n"
    << "     '' using 1:4 skip 1 with lines title 'Re v'\n"
    << "set logscale y\nset ylabel '|amplitude| (log)'\n"
    << "plot '" << csv.filename().string() << "' using 1:(abs($2)) skip 1 with lines title '|u|', \\\n"
    << "     '' using 1:(abs($4)) skip 1 with lines title '|v|'\n"
    << "unset multiplot\n";
  write_file_atomic(out, s.str());
  return out;
}

std::vector<std::vector<double>> parse_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<fs::path> trace_scripts(const fs::path& csv, const std::string& text) {
  const auto rows = parse_rows(text);
  if (rows.empty()) throw Error(ErrorKind::UnknownSchema, csv.string() + " has no data rows");
  const double m0 = rows[0][2], e0 = rows[0][3], v0 = rows[0][7];
  const double v1 = rows.size() > 1 ? (rows[1][7] - rows[0][7]) / (rows[1][0] - rows[0][0]) : 0.0;
  const auto name = csv.filename().string();

  std::optional<double> delta;
  const auto sidecar = sibling(csv, ".json");
  if (fs::exists(sidecar)) {
    const auto doc = Json::parse(read_file(sidecar), nullptr, false);
    if (!doc.is_discarded() && doc.contains("delta") && doc["delta"].is_number()) delta = doc["delta"].get<double>();
  }

  std::vector<fs::path> out;
  {
    const auto path = sibling(csv, "_conservation.gp");
    std::ostringstream s;
    s << preamble("relative drift of mass and energy", sibling(csv, "_conservation.png"))
      << "set xlabel 't'\nset ylabel 'relative drift'\nset logscale y\nset format y '%.0e'\n"
      << "M0 = " << format_double(m0) << "\nE0 = " << format_double(e0) << "\n"
      << "plot '" << name << "' using 1:(abs($3/M0 - 1) + 1e-18) skip 1 with lines title 'mass', \\\n"
      << "     '' using 1:(abs(($4 - E0)/E0) + 1e-18) skip 1 with lines title 'energy'\n";
    write_file_atomic(path, s.str());
    out.push_back(path);
  }
  {
    const auto path = sibling(csv, "_virial.gp");
    std::ostringstream s;
    s << preamble("second moment V(t)", sibling(csv, "_virial.png")) << "set xlabel 't'\nset ylabel 'V(t)'\n"
      << "V0 = " << format_double(v0) << "\nV1 = " << format_double(v1) << "\n";
    if (delta) {
      s << "delta = " << format_double(*delta) << "\n"
        << "# reference parabola with second derivative -8 delta\n"
        << "ref(t) = V0 + V1*t - 4*delta*t**2\n"
        << "plot '" << name << "' using 1:8 skip 1 with lines title 'V(t)', \\\n"
        << "     ref(x) with lines dashtype 2 title 'V0 + V1 t - 4 delta t^2'\n";
    } else {
      s << "plot '" << name << "' using 1:8 skip 1 with lines title 'V(t)'\n";
    }
    write_file_atomic(path, s.str());
    out.push_back(path);
  }
  return out;
}

fs::path tstar_script(const fs::path& report, const Json& doc) {
  std::ostringstream data;
  data << "gamma,t_star\n";
  for (const auto& r : doc.at("records"))
    if (r.contains("t_star") && r["t_star"].is_number())
      data << format_double(r["gamma"].get<double>()) << ',' << format_double(r["t_star"].get<double>()) << '\n';
  const auto dat = sibling(report, "_tstar.csv");
  write_file_atomic(dat, data.str());

  const auto path = sibling(report, "_tstar.gp");
  std::ostringstream s;
  s << preamble("blow-up time against dilation", sibling(report, "_tstar.png"))
    << "set xlabel 'gamma'\nset ylabel 't*'\nset logscale y\n"
    << "plot '" << dat.filename().string() << "' using 1:2 skip 1 with linespoints pointtype 7 title 't*'\n";
  write_file_atomic(path, s.str());
  return path;
}

}  // namespace

std::vector<fs::path> emit_plot_script(const fs::path& input) {
  const auto text = read_file(input);
  const auto head = first_line(text);
  if (head == kTraceHeader) return trace_scripts(input, text);
  if (head == "r,re_u,im_u,re_v,im_v") return {profile_script(input, sibling(input, "_profiles.gp"))};

  const auto doc = Json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_object()) {
    if (doc.contains("records") && doc.contains("gamma_values")) return {tstar_script(input, doc)};
    if (doc.contains("state") && doc.contains("d_omega")) {
      const auto csv = sibling(input, "_profile.csv");
      if (!fs::exists(csv))
        throw Error(ErrorKind::UnknownSchema, "profile CSV " + csv.string() + " not found next to " + input.string());
      return {profile_script(csv, sibling(input, "_profiles.gp"))};
    }
    if (doc.contains("trace") && doc["trace"].is_string()) {
      const auto trace = input.parent_path() / doc["trace"].get<std::string>();
      return trace_scripts(trace, read_file(trace));
    }
  }
  throw Error(ErrorKind::UnknownSchema, "cannot tell what " + input.string() + " contains");
}

}  // namespace quadnls
