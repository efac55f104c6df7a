#pragma once

#include <string>

namespace shiptrack {

/// Axis-aligned bounding box in continuous pixel coordinates,
/// stored as (left, top, width, height) to match the MOT17 file layout.
/// Construction rejects non-positive dimensions and non-finite fields.
class BBox {
 public:
  BBox(double x, double y, double w, double h);

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }

  double left() const { return x_; }
  double top() const { return y_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  double center_x() const { return x_ + 0.5 * w_; }
  double center_y() const { return y_ + 0.5 * h_; }
  double aspect() const { return w_ / h_; }

  bool operator==(const BBox& other) const = default;

 private:
  double x_;
  double y_;
  double w_;
  double h_;
};

/// Area breakdown of a box pair: overlap, union, smallest enclosing
/// axis-aligned rectangle C, and the part of C covered by neither box.
struct EnclosureDecomposition {
  double intersection_area;
  double union_area;
  double enclosure_area;
  double residual_area;  // enclosure_area - union_area, >= 0
};

double area(const BBox& b);

EnclosureDecomposition decompose(const BBox& b1, const BBox& b2);

/// Overlap / union. 0 for disjoint boxes, 1 iff the boxes coincide.
double iou(const BBox& b1, const BBox& b2);

/// IoU minus the normalized empty area of the enclosing rectangle. Range (-1, 1].
double giou(const BBox& b1, const BBox& b2);

/// IoU minus squared center distance over squared enclosure diagonal. Range (-1, 1].
double diou(const BBox& b1, const BBox& b2);

/// min(|b1|, |b2|) / |C|. Strictly positive for any two valid boxes,
/// 1 iff the boxes coincide, and sensitive to shape mismatch.
double tiou(const BBox& b1, const BBox& b2);

enum class SimilarityMetric { IoU, GIoU, DIoU, TIoU };

double similarity(const BBox& b1, const BBox& b2, SimilarityMetric kind);

std::string metric_name(SimilarityMetric kind);

/// Parses "iou" / "giou" / "diou" / "tiou" (case-insensitive).
/// Throws std::invalid_argument on anything else.
SimilarityMetric parse_metric(const std::string& name);

}  // namespace shiptrack
