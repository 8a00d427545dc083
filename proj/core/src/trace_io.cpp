#include "otd/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace otd {
namespace {

using nlohmann::json;

double parse_double(std::string_view field, std::size_t row, std::size_t col) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw IoError("row " + std::to_string(row) + ": column " + std::to_string(col + 1) +
                  " is not a number: '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& trace_path) {
  std::filesystem::path p = trace_path;
  p.replace_extension(".meta.json");
  return p;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

CanTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path.string());

  CanTrace trace;
  trace.file_id = path.stem().string();

  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  ++row;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceCsvHeader)
    throw IoError(path.string() + ": row 1: unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 1 + kNumSignals)
      throw IoError(path.string() + ": row " + std::to_string(row) + ": expected " +
                    std::to_string(1 + kNumSignals) + " columns, got " +
                    std::to_string(fields.size()));
    Sample s;
    s.t = parse_double(fields[0], row, 0);
    for (int i = 0; i < kNumContinuous; ++i)
      s.cont[static_cast<std::size_t>(i)] =
          parse_double(fields[static_cast<std::size_t>(1 + i)], row,
                       static_cast<std::size_t>(1 + i));
    for (int i = 0; i < kNumCategorical; ++i) {
      const double v = parse_double(fields[static_cast<std::size_t>(1 + kNumContinuous + i)],
                                    row, static_cast<std::size_t>(1 + kNumContinuous + i));
      s.cat[static_cast<std::size_t>(i)] = static_cast<int>(v);
      if (v != 0.0 && v != 1.0)
        throw IoError(path.string() + ": row " + std::to_string(row) +
                      ": categorical value must be 0 or 1");
    }
    if (auto msg = check_sample(s); !msg.empty())
      throw IoError(path.string() + ": row " + std::to_string(row) + ": " + msg);
    trace.samples.push_back(s);
  }

  const auto meta = sidecar_path(path);
  if (std::filesystem::exists(meta)) {
    std::ifstream min(meta);
    json j;
    try {
      min >> j;
    } catch (const json::exception& e) {
      throw IoError(meta.string() + ": invalid JSON: " + e.what());
    }
    trace.truck_id = j.value("truck", "");
    trace.file_id = j.value("file_id", trace.file_id);
    if (j.contains("label") && !j["label"].is_null()) {
      const int lv = j["label"].get<int>();
      if (lv != 0 && lv != 1)
        throw IoError(meta.string() + ": label must be 0 or 1, got " + std::to_string(lv));
      trace.label = lv == 1 ? ManeuverLabel::Overtake : ManeuverLabel::NoOvertake;
    }
  }

  try {
    trace.validate();
  } catch (const TraceError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return trace;
}

void save_trace(const CanTrace& trace, const std::filesystem::path& path) {
  trace.validate();

  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const Sample& s : trace.samples) {
    out << format_double(s.t);
    for (double v : s.cont) out << ',' << format_double(v);
    for (int v : s.cat) out << ',' << v;
    out << '\n';
  }

  std::ofstream f(path);
  if (!f) throw IoError("cannot write trace file: " + path.string());
  f << out.str();
  if (!f) throw IoError("write failed: " + path.string());

  json meta;
  meta["truck"] = trace.truck_id;
  meta["file_id"] = trace.file_id;
  if (trace.label)
    meta["label"] = label_value(*trace.label);
  else
    meta["label"] = nullptr;
  std::ofstream mf(sidecar_path(path));
  if (!mf) throw IoError("cannot write sidecar: " + sidecar_path(path).string());
  mf << meta.dump(2) << '\n';
}

}  // namespace otd
