#include "shiptrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shiptrack {

MotParseError::MotParseError(std::size_t line_number, std::string line_text,
                             const std::string& what)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + what + " in \"" +
                         line_text + "\""),
      line_number_(line_number),
      line_text_(std::move(line_text)) {}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line_no, const std::string& line,
                    const char* name) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw MotParseError(line_no, line, std::string("bad ") + name + " field");
  }
  return value;
}

int parse_int(std::string_view field, std::size_t line_no, const std::string& line,
              const char* name) {
  field = trim(field);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    // MOT files in the wild sometimes carry integral fields as "3.0".
    const double d = parse_double(field, line_no, line, name);
    if (d != std::floor(d) || std::abs(d) > 1e9) {
      throw MotParseError(line_no, line, std::string("bad ") + name + " field");
    }
    return static_cast<int>(d);
  }
  return value;
}

}  // namespace

std::vector<MotRecord> parse_mot(std::istream& in, MotFileKind kind) {
  std::vector<MotRecord> records;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() < 7) {
      throw MotParseError(line_no, line, "expected at least 7 comma-separated fields");
    }

    MotRecord rec;
    rec.frame = parse_int(fields[0], line_no, line, "frame");
    rec.id = parse_int(fields[1], line_no, line, "id");
    rec.x = parse_double(fields[2], line_no, line, "x");
    rec.y = parse_double(fields[3], line_no, line, "y");
    rec.w = parse_double(fields[4], line_no, line, "w");
    rec.h = parse_double(fields[5], line_no, line, "h");
    rec.conf = parse_double(fields[6], line_no, line, "conf");

    if (rec.frame < 1) throw MotParseError(line_no, line, "frame index must be >= 1");
    if (!(rec.w > 0.0) || !(rec.h > 0.0)) {
      throw MotParseError(line_no, line, "box width and height must be positive");
    }

    if (kind != MotFileKind::Results) {
      if (fields.size() >= 8) rec.class_id = parse_int(fields[7], line_no, line, "class");
      if (fields.size() >= 9) {
        const double vis = parse_double(fields[8], line_no, line, "visibility");
        if (vis > 1.0) throw MotParseError(line_no, line, "visibility above 1");
        rec.visibility = vis < 0.0 ? 1.0 : vis;  // negative means absent
      }
    }
    if (kind == MotFileKind::Detections && fields.size() < 8) rec.class_id = -1;

    records.push_back(rec);
  }

  std::stable_sort(records.begin(), records.end(), [](const MotRecord& a, const MotRecord& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });
  return records;
}

std::vector<MotRecord> parse_mot_file(const std::filesystem::path& path, MotFileKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_mot(in, kind);
}

namespace {

std::size_t write_line(std::ostream& out, const char* fmt, auto... args) {
  char buf[320];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  if (n < 0 || n >= static_cast<int>(sizeof buf)) {
    throw std::runtime_error("record too long to format");
  }
  out.write(buf, n);
  if (!out) throw std::runtime_error("write failed");
  return static_cast<std::size_t>(n);
}

}  // namespace

std::size_t write_results(std::ostream& out, std::span<const ResultRecord> records) {
  std::size_t bytes = 0;
  for (const auto& r : records) {
    if (r.frame < 1 || r.track_id < 1) {
      throw std::invalid_argument("write_results: frame and track id must be positive");
    }
    bytes += write_line(out, "%d,%d,%.2f,%.2f,%.2f,%.2f,%.4f,-1,-1,-1\n", r.frame, r.track_id,
                        r.bbox.x(), r.bbox.y(), r.bbox.w(), r.bbox.h(), r.confidence);
  }
  return bytes;
}

std::size_t write_ground_truth(std::ostream& out, std::span<const GtEntry> entries) {
  std::size_t bytes = 0;
  for (const auto& e : entries) {
    bytes += write_line(out, "%d,%d,%.2f,%.2f,%.2f,%.2f,%d,%d,%.2f\n", e.frame, e.object_id,
                        e.bbox.x(), e.bbox.y(), e.bbox.w(), e.bbox.h(), e.considered ? 1 : 0,
                        e.class_id, e.visibility);
  }
  return bytes;
}

std::size_t write_detections(std::ostream& out,
                             const std::map<int, std::vector<Detection>>& per_frame) {
  std::size_t bytes = 0;
  for (const auto& [frame, dets] : per_frame) {
    for (const auto& d : dets) {
      bytes += write_line(out, "%d,-1,%.2f,%.2f,%.2f,%.2f,%.4f\n", frame, d.bbox.x(), d.bbox.y(),
                          d.bbox.w(), d.bbox.h(), d.confidence);
    }
  }
  return bytes;
}

std::vector<GtEntry> to_gt_entries(const std::vector<MotRecord>& records) {
  std::vector<GtEntry> entries;
  entries.reserve(records.size());
  for (const auto& r : records) {
    entries.push_back(GtEntry{
        .frame = r.frame,
        .object_id = r.id,
        .bbox = BBox(r.x, r.y, r.w, r.h),
        .visibility = r.visibility,
        .class_id = r.class_id,
        .considered = r.conf != 0.0,
    });
  }
  return entries;
}

std::map<int, std::vector<Detection>> to_detections(const std::vector<MotRecord>& records) {
  std::map<int, std::vector<Detection>> per_frame;
  for (const auto& r : records) {
    per_frame[r.frame].push_back(Detection{
        .bbox = BBox(r.x, r.y, r.w, r.h),
        .confidence = r.conf,
        .class_id = r.class_id,
    });
  }
  return per_frame;
}

std::vector<FrameResult> to_frame_results(const std::vector<MotRecord>& records) {
  std::vector<FrameResult> results;
  for (const auto& r : records) {
    if (results.empty() || results.back().frame_index != r.frame) {
      results.push_back(FrameResult{.frame_index = r.frame, .outputs = {}});
    }
    results.back().outputs.push_back(TrackOutput{r.id, BBox(r.x, r.y, r.w, r.h), r.conf});
  }
  return results;
}

}  // namespace shiptrack
