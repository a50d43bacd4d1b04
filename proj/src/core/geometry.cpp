#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace leafscope::geom {

namespace {

// Moore neighborhood in clockwise screen order starting at west.
constexpr int kNeighborDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kNeighborDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

Contour trace_from(const BinaryMask& mask, int sx, int sy) {
    auto is_set = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < mask.width && y < mask.height && mask.at(x, y);
    };

    Contour contour;
    contour.points.push_back({sx, sy});

    // Backtrack starts west of the topmost-leftmost pixel, which is
    // guaranteed to be background.
    int px = sx, py = sy;
    int backtrack = 0;
    const int start_backtrack = backtrack;
    size_t guard = 4 * mask.bits.size() + 16;

    while (guard--) {
        int found = -1;
        for (int step = 1; step <= 8; ++step) {
            int dir = (backtrack + step) % 8;
            if (is_set(px + kNeighborDx[dir], py + kNeighborDy[dir])) {
                found = dir;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel
        int nx = px + kNeighborDx[found];
        int ny = py + kNeighborDy[found];
        // New backtrack: the neighbor checked just before the hit, seen
        // from the new pixel.
        int prev_dir = (found + 7) % 8;
        int bx = px + kNeighborDx[prev_dir];
        int by = py + kNeighborDy[prev_dir];
        int nb = 0;
        for (int d = 0; d < 8; ++d) {
            if (nx + kNeighborDx[d] == bx && ny + kNeighborDy[d] == by) {
                nb = d;
                break;
            }
        }
        px = nx;
        py = ny;
        backtrack = nb;
        if (px == sx && py == sy && backtrack == start_backtrack) break;
        contour.points.push_back({px, py});
    }
    return contour;
}

}  // namespace

std::vector<Contour> trace_contours(const BinaryMask& mask) {
    int w = mask.width, h = mask.height;
    std::vector<int32_t> component(static_cast<size_t>(w) * h, -1);
    std::vector<Contour> contours;
    std::vector<int> stack;

    int next_component = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || component[static_cast<size_t>(y) * w + x] >= 0) continue;
            // (x, y) is the topmost-leftmost pixel of a new 8-connected
            // region; flood it and trace its border.
            int id = next_component++;
            component[static_cast<size_t>(y) * w + x] = id;
            stack.push_back(y * w + x);
            while (!stack.empty()) {
                int p = stack.back();
                stack.pop_back();
                int cx = p % w, cy = p / w;
                for (int d = 0; d < 8; ++d) {
                    int nx = cx + kNeighborDx[d], ny = cy + kNeighborDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    size_t ni = static_cast<size_t>(ny) * w + nx;
                    if (mask.bits[ni] && component[ni] < 0) {
                        component[ni] = id;
                        stack.push_back(ny * w + nx);
                    }
                }
            }
            Contour c = trace_from(mask, x, y);
            if (c.points.size() < 3) continue;
            if (signed_area(c) < 0) std::reverse(c.points.begin(), c.points.end());
            contours.push_back(std::move(c));
        }
    }
    if (contours.empty()) raise(ErrorCode::Degenerate, "no contour found");
    return contours;
}

double signed_area(const Contour& c) {
    const auto& p = c.points;
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Point& a = p[i];
        const Point& b = p[(i + 1) % p.size()];
        sum += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
    }
    return 0.5 * sum;
}

double contour_area(const Contour& c) { return std::abs(signed_area(c)); }

double contour_perimeter(const Contour& c) {
    const auto& p = c.points;
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Point& a = p[i];
        const Point& b = p[(i + 1) % p.size()];
        double dx = b.x - a.x, dy = b.y - a.y;
        sum += std::sqrt(dx * dx + dy * dy);
    }
    return sum;
}

namespace {

inline long long cross(const Point& o, const Point& a, const Point& b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

}  // namespace

Contour convex_hull(const Contour& c) {
    std::vector<Point> pts = c.points;
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) raise(ErrorCode::Degenerate, "hull undefined for degenerate contour");

    std::vector<Point> hull(2 * pts.size());
    size_t k = 0;
    for (const Point& p : pts) {  // lower
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {  // upper
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    Contour out{std::move(hull)};
    if (signed_area(out) < 0) std::reverse(out.points.begin(), out.points.end());
    return out;
}

namespace {

double point_line_distance(const Point& p, const Point& a, const Point& b) {
    double abx = b.x - a.x, aby = b.y - a.y;
    double len = std::sqrt(abx * abx + aby * aby);
    if (len == 0.0) {
        double dx = p.x - a.x, dy = p.y - a.y;
        return std::sqrt(dx * dx + dy * dy);
    }
    return std::abs(abx * (p.y - a.y) - aby * (p.x - a.x)) / len;
}

}  // namespace

std::vector<ConvexityDefect> convexity_defects(const Contour& c, const Contour& hull) {
    // Hull vertices mapped back to contour indices, walked in contour order.
    std::vector<size_t> hull_idx;
    for (const Point& hp : hull.points) {
        for (size_t i = 0; i < c.points.size(); ++i) {
            if (c.points[i] == hp) {
                hull_idx.push_back(i);
                break;
            }
        }
    }
    std::sort(hull_idx.begin(), hull_idx.end());
    hull_idx.erase(std::unique(hull_idx.begin(), hull_idx.end()), hull_idx.end());
    if (hull_idx.size() < 2) return {};

    std::vector<ConvexityDefect> defects;
    size_t n = c.points.size();
    for (size_t e = 0; e < hull_idx.size(); ++e) {
        size_t i = hull_idx[e];
        size_t j = hull_idx[(e + 1) % hull_idx.size()];
        double depth = 0.0;
        size_t farthest = i;
        for (size_t k = (i + 1) % n; k != j; k = (k + 1) % n) {
            double d = point_line_distance(c.points[k], c.points[i], c.points[j]);
            if (d > depth) {
                depth = d;
                farthest = k;
            }
        }
        if (depth >= 1.0) defects.push_back({i, j, farthest, depth});
    }
    return defects;
}

std::vector<Point> contour_interior(const Contour& c) {
    // Even-odd scanline fill over the contour polygon with a half-open
    // crossing rule, then the contour pixels themselves.
    Rect box = bounding_rect(c);
    BinaryMask covered(box.width, box.height);
    const auto& p = c.points;
    for (int y = box.y; y < box.y + box.height; ++y) {
        std::vector<double> crossings;
        for (size_t i = 0; i < p.size(); ++i) {
            const Point& a = p[i];
            const Point& b = p[(i + 1) % p.size()];
            if (a.y == b.y) continue;
            int ymin = std::min(a.y, b.y), ymax = std::max(a.y, b.y);
            if (y < ymin || y >= ymax) continue;
            double t = static_cast<double>(y - a.y) / (b.y - a.y);
            crossings.push_back(a.x + t * (b.x - a.x));
        }
        std::sort(crossings.begin(), crossings.end());
        for (size_t i = 0; i + 1 < crossings.size(); i += 2) {
            int x0 = static_cast<int>(std::ceil(crossings[i]));
            int x1 = static_cast<int>(std::floor(crossings[i + 1]));
            for (int x = std::max(x0, box.x); x <= std::min(x1, box.x + box.width - 1); ++x)
                covered.set(x - box.x, y - box.y, true);
        }
    }
    for (const Point& q : p) covered.set(q.x - box.x, q.y - box.y, true);

    std::vector<Point> interior;
    for (int y = 0; y < box.height; ++y)
        for (int x = 0; x < box.width; ++x)
            if (covered.at(x, y)) interior.push_back({x + box.x, y + box.y});
    return interior;
}

EllipseAxes fit_ellipse_axes(const Contour& c) {
    std::vector<Point> region = contour_interior(c);
    double n = static_cast<double>(region.size());
    if (region.empty()) raise(ErrorCode::Degenerate, "ellipse undefined");

    double mx = 0.0, my = 0.0;
    for (const Point& p : region) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double cxx = 0.0, cyy = 0.0, cxy = 0.0;
    for (const Point& p : region) {
        double dx = p.x - mx, dy = p.y - my;
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    cxx /= n;
    cyy /= n;
    cxy /= n;

    double tr = cxx + cyy;
    double det = cxx * cyy - cxy * cxy;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double l1 = tr / 2.0 + disc;
    double l2 = tr / 2.0 - disc;
    if (l2 <= 1e-12) raise(ErrorCode::Degenerate, "ellipse undefined");
    return {2.0 * std::sqrt(l1), 2.0 * std::sqrt(l2)};
}

Rect bounding_rect(const Contour& c) {
    if (c.points.empty()) raise(ErrorCode::Degenerate, "empty contour");
    int minx = std::numeric_limits<int>::max(), miny = minx;
    int maxx = std::numeric_limits<int>::min(), maxy = maxx;
    for (const Point& p : c.points) {
        minx = std::min(minx, p.x);
        miny = std::min(miny, p.y);
        maxx = std::max(maxx, p.x);
        maxy = std::max(maxy, p.y);
    }
    return {minx, miny, maxx - minx + 1, maxy - miny + 1};
}

std::array<double, 4> hu_moments4(const RealImage& img) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = img.at(x, y);
            m00 += v;
            m10 += x * v;
            m01 += y * v;
        }
    }
    if (m00 <= 0.0) raise(ErrorCode::Degenerate, "moments undefined for zero-mass image");
    double cx = m10 / m00, cy = m01 / m00;

    double mu20 = 0, mu02 = 0, mu11 = 0, mu30 = 0, mu03 = 0, mu21 = 0, mu12 = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = img.at(x, y);
            if (v == 0.0) continue;
            double dx = x - cx, dy = y - cy;
            mu20 += dx * dx * v;
            mu02 += dy * dy * v;
            mu11 += dx * dy * v;
            mu30 += dx * dx * dx * v;
            mu03 += dy * dy * dy * v;
            mu21 += dx * dx * dy * v;
            mu12 += dx * dy * dy * v;
        }
    }
    double s2 = std::pow(m00, 2.0);   // 1 + (p+q)/2 with p+q = 2
    double s3 = std::pow(m00, 2.5);   // p+q = 3
    double n20 = mu20 / s2, n02 = mu02 / s2, n11 = mu11 / s2;
    double n30 = mu30 / s3, n03 = mu03 / s3, n21 = mu21 / s3, n12 = mu12 / s3;

    std::array<double, 4> phi;
    phi[0] = n20 + n02;
    phi[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
    phi[2] = (n30 - 3.0 * n12) * (n30 - 3.0 * n12) + (3.0 * n21 - n03) * (3.0 * n21 - n03);
    phi[3] = (n30 + n12) * (n30 + n12) + (n21 + n03) * (n21 + n03);
    return phi;
}

namespace {

RealImage gaussian_smooth(const RealImage& img, double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& w : k) w /= sum;

    RealImage tmp(img.width, img.height), out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * img.at(std::clamp(x + i, 0, img.width - 1), y);
            tmp.at(x, y) = acc;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp.at(x, std::clamp(y + i, 0, img.height - 1));
            out.at(x, y) = acc;
        }
    return out;
}

}  // namespace

int harris_corner_count(const GrayImage& img, double k, double rel_threshold) {
    if (img.width < 5 || img.height < 5)
        raise(ErrorCode::InvalidArgument, "harris needs at least a 5x5 image");
    int w = img.width, h = img.height;
    auto px = [&](int x, int y) {
        return static_cast<double>(img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
    };

    RealImage ixx(w, h), iyy(w, h), ixy(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = -px(x - 1, y - 1) + px(x + 1, y - 1) - 2 * px(x - 1, y) +
                        2 * px(x + 1, y) - px(x - 1, y + 1) + px(x + 1, y + 1);
            double gy = -px(x - 1, y - 1) - 2 * px(x, y - 1) - px(x + 1, y - 1) +
                        px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1);
            ixx.at(x, y) = gx * gx;
            iyy.at(x, y) = gy * gy;
            ixy.at(x, y) = gx * gy;
        }
    }
    RealImage a = gaussian_smooth(ixx, 1.0);
    RealImage b = gaussian_smooth(ixy, 1.0);
    RealImage c = gaussian_smooth(iyy, 1.0);

    RealImage r(w, h);
    double max_r = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < r.values.size(); ++i) {
        double det = a.values[i] * c.values[i] - b.values[i] * b.values[i];
        double trace = a.values[i] + c.values[i];
        r.values[i] = det - k * trace * trace;
        max_r = std::max(max_r, r.values[i]);
    }
    if (max_r <= 0.0) return 0;
    double threshold = rel_threshold * max_r;

    int count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = r.at(x, y);
            if (v <= threshold) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    double q = r.at(nx, ny);
                    // Plateaus count once, at their first pixel in scan order.
                    if (q > v || (q == v && (ny < y || (ny == y && nx < x)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) ++count;
        }
    }
    return count;
}

std::vector<double> centroid_radii(const Contour& c, int n) {
    const auto& p = c.points;
    if (p.size() < 3) raise(ErrorCode::Degenerate, "degenerate contour");

    double cx = 0.0, cy = 0.0;
    for (const Point& q : p) {
        cx += q.x;
        cy += q.y;
    }
    cx /= p.size();
    cy /= p.size();

    // Start at the point whose direction from the centroid is closest to
    // the positive x axis; ties prefer the larger radius.
    size_t start = 0;
    double best_angle = std::numeric_limits<double>::infinity();
    double best_radius = -1.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double dx = p[i].x - cx, dy = p[i].y - cy;
        double radius = std::sqrt(dx * dx + dy * dy);
        if (radius == 0.0) continue;
        double angle = std::abs(std::atan2(dy, dx));
        if (angle < best_angle || (angle == best_angle && radius > best_radius)) {
            best_angle = angle;
            best_radius = radius;
            start = i;
        }
    }

    size_t m = p.size();
    std::vector<double> seg_len(m);
    double total = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const Point& a = p[(start + i) % m];
        const Point& b = p[(start + i + 1) % m];
        double dx = b.x - a.x, dy = b.y - a.y;
        seg_len[i] = std::sqrt(dx * dx + dy * dy);
        total += seg_len[i];
    }
    if (total == 0.0) raise(ErrorCode::Degenerate, "degenerate contour");

    std::vector<double> out(n);
    double max_dist = 0.0;
    size_t seg = 0;
    double seg_start = 0.0;
    for (int k = 0; k < n; ++k) {
        double s = total * k / n;
        while (seg + 1 < m && seg_start + seg_len[seg] <= s) {
            seg_start += seg_len[seg];
            ++seg;
        }
        const Point& a = p[(start + seg) % m];
        const Point& b = p[(start + seg + 1) % m];
        double t = seg_len[seg] > 0 ? (s - seg_start) / seg_len[seg] : 0.0;
        double x = a.x + t * (b.x - a.x);
        double y = a.y + t * (b.y - a.y);
        double dx = x - cx, dy = y - cy;
        out[k] = std::sqrt(dx * dx + dy * dy);
        max_dist = std::max(max_dist, out[k]);
    }
    if (max_dist == 0.0) raise(ErrorCode::Degenerate, "degenerate contour");
    for (double& v : out) v /= max_dist;
    return out;
}

}  // namespace leafscope::geom
