#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "sur/classifiers.hpp"

namespace sur::clf {

namespace {

constexpr int kGrid = 4;

struct CellStats {
  double r = 0.0, g = 0.0, b = 0.0;
  double brightness() const { return (r + g + b) / 3.0; }

  bool sky_like() const {
    const bool blue_dominant = b > r + 20.0 && b > g + 10.0 && brightness() > 100.0;
    const bool near_white = std::min({r, g, b}) > 180.0 && brightness() > 180.0;
    return blue_dominant || near_white;
  }

  bool vegetation_green() const {
    return g > r + 15.0 && g > b + 15.0 && g > 60.0;
  }
};

} // namespace

SpaceType classify_indoor_outdoor(const std::optional<std::string>& image_path,
                                  std::string* diagnostic) {
  if (!image_path.has_value()) return SpaceType::kUnknown;

  cv::Mat img = cv::imread(*image_path, cv::IMREAD_COLOR);
  if (img.empty() || img.rows < kGrid || img.cols < kGrid) {
    if (diagnostic != nullptr) {
      *diagnostic = "could not decode image: " + *image_path;
    }
    return SpaceType::kUnknown;
  }

  int sky_in_top_row = 0;
  int green_cells = 0;
  for (int gy = 0; gy < kGrid; ++gy) {
    for (int gx = 0; gx < kGrid; ++gx) {
      const int x0 = img.cols * gx / kGrid;
      const int x1 = img.cols * (gx + 1) / kGrid;
      const int y0 = img.rows * gy / kGrid;
      const int y1 = img.rows * (gy + 1) / kGrid;
      const cv::Scalar mean =
          cv::mean(img(cv::Rect(x0, y0, x1 - x0, y1 - y0)));
      const CellStats cell{mean[2], mean[1], mean[0]}; // imread is BGR

      if (gy == 0 && cell.sky_like()) ++sky_in_top_row;
      if (cell.vegetation_green()) ++green_cells;
    }
  }

  const double evidence =
      static_cast<double>(sky_in_top_row) / kGrid +
      static_cast<double>(green_cells) / (kGrid * kGrid);
  if (evidence > 0.5) return SpaceType::kOutside;
  if (evidence < 0.2) return SpaceType::kInside;
  return SpaceType::kUnknown;
}

} // namespace sur::clf
