#include "shiptrack/bbox.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace shiptrack {

BBox::BBox(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
  if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h))) {
    throw std::invalid_argument("BBox: fields must be finite");
  }
  if (!(w > 0.0 && h > 0.0)) {
    throw std::invalid_argument("BBox: width and height must be positive");
  }
}

double area(const BBox& b) { return b.w() * b.h(); }

namespace {

double interval_overlap(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

}  // namespace

EnclosureDecomposition decompose(const BBox& b1, const BBox& b2) {
  const double inter = interval_overlap(b1.left(), b1.right(), b2.left(), b2.right()) *
                       interval_overlap(b1.top(), b1.bottom(), b2.top(), b2.bottom());
  const double uni = area(b1) + area(b2) - inter;
  const double enclosure = (std::max(b1.right(), b2.right()) - std::min(b1.left(), b2.left())) *
                           (std::max(b1.bottom(), b2.bottom()) - std::min(b1.top(), b2.top()));
  return EnclosureDecomposition{
      .intersection_area = inter,
      .union_area = uni,
      .enclosure_area = enclosure,
      .residual_area = std::max(0.0, enclosure - uni),
  };
}

double iou(const BBox& b1, const BBox& b2) {
  const auto d = decompose(b1, b2);
  return d.intersection_area / d.union_area;
}

double giou(const BBox& b1, const BBox& b2) {
  const auto d = decompose(b1, b2);
  return d.intersection_area / d.union_area - d.residual_area / d.enclosure_area;
}

double diou(const BBox& b1, const BBox& b2) {
  const auto d = decompose(b1, b2);
  const double dx = b1.center_x() - b2.center_x();
  const double dy = b1.center_y() - b2.center_y();
  const double cw = std::max(b1.right(), b2.right()) - std::min(b1.left(), b2.left());
  const double ch = std::max(b1.bottom(), b2.bottom()) - std::min(b1.top(), b2.top());
  return d.intersection_area / d.union_area - (dx * dx + dy * dy) / (cw * cw + ch * ch);
}

double tiou(const BBox& b1, const BBox& b2) {
  const auto d = decompose(b1, b2);
  return std::min(area(b1), area(b2)) / d.enclosure_area;
}

double similarity(const BBox& b1, const BBox& b2, SimilarityMetric kind) {
  switch (kind) {
    case SimilarityMetric::IoU:
      return iou(b1, b2);
    case SimilarityMetric::GIoU:
      return giou(b1, b2);
    case SimilarityMetric::DIoU:
      return diou(b1, b2);
    case SimilarityMetric::TIoU:
      return tiou(b1, b2);
  }
  throw std::invalid_argument("similarity: unknown metric kind");
}

std::string metric_name(SimilarityMetric kind) {
  switch (kind) {
    case SimilarityMetric::IoU:
      return "iou";
    case SimilarityMetric::GIoU:
      return "giou";
    case SimilarityMetric::DIoU:
      return "diou";
    case SimilarityMetric::TIoU:
      return "tiou";
  }
  return "unknown";
}

SimilarityMetric parse_metric(const std::string& name) {
  std::string lower;
  lower.reserve(name.size());
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "iou") return SimilarityMetric::IoU;
  if (lower == "giou") return SimilarityMetric::GIoU;
  if (lower == "diou") return SimilarityMetric::DIoU;
  if (lower == "tiou") return SimilarityMetric::TIoU;
  throw std::invalid_argument("unknown metric '" + name + "' (expected iou|giou|diou|tiou)");
}

}  // namespace shiptrack
