#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiptrack/bbox.hpp"
#include "shiptrack/clear_metrics.hpp"
#include "shiptrack/tracker.hpp"

namespace shiptrack {

/// One line of a MOT17-style comma-separated file.
struct MotRecord {
  int frame = 0;
  int id = -1;
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
  double conf = 1.0;
  int class_id = -1;
  double visibility = 1.0;

  bool operator==(const MotRecord&) const = default;
};

enum class MotFileKind { Detections, GroundTruth, Results };

/// Parse failure, carrying the 1-based line number and the offending line.
class MotParseError : public std::runtime_error {
 public:
  MotParseError(std::size_t line_number, std::string line_text, const std::string& what);

  std::size_t line_number() const { return line_number_; }
  const std::string& line_text() const { return line_text_; }

 private:
  std::size_t line_number_;
  std::string line_text_;
};

/// Reads comma-separated records, one per line, LF or CRLF. Records come
/// back sorted by (frame, id). For Results files the trailing world
/// coordinates are ignored; for the other kinds field 8 is the class id
/// and field 9 the visibility (negative values mean absent). Empty input
/// yields an empty list.
std::vector<MotRecord> parse_mot(std::istream& in, MotFileKind kind);
std::vector<MotRecord> parse_mot_file(const std::filesystem::path& path, MotFileKind kind);

struct ResultRecord {
  int frame;
  int track_id;
  BBox bbox;
  double confidence;
};

/// Writes MOT17 result lines "frame,id,x,y,w,h,conf,-1,-1,-1" with fixed
/// decimals (2 for geometry, 4 for confidence). Returns bytes written.
std::size_t write_results(std::ostream& out, std::span<const ResultRecord> records);

/// Ground-truth lines "frame,id,x,y,w,h,considered,class,visibility".
std::size_t write_ground_truth(std::ostream& out, std::span<const GtEntry> entries);

/// Detection lines "frame,-1,x,y,w,h,conf", grouped per frame.
std::size_t write_detections(std::ostream& out,
                             const std::map<int, std::vector<Detection>>& per_frame);

std::vector<GtEntry> to_gt_entries(const std::vector<MotRecord>& records);
std::map<int, std::vector<Detection>> to_detections(const std::vector<MotRecord>& records);
std::vector<FrameResult> to_frame_results(const std::vector<MotRecord>& records);

}  // namespace shiptrack
