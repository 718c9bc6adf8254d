#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace covkg::geo {

/// Vertex coincidence tolerance for all predicates.
inline constexpr double kEpsilon = 1e-9;

/// Planar coordinate; x is longitude, y is latitude.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Closed coordinate sequence (first vertex repeated as last).
using Ring = std::vector<Point>;

/// First ring is the exterior shell, the rest are holes.
struct Polygon {
    std::vector<Ring> rings;

    friend bool operator==(const Polygon&, const Polygon&) = default;
};

enum class GeometryKind { point, polygon, multipolygon };

struct BoundingBox {
    double min_x, min_y, max_x, max_y;
};

/// Immutable point, polygon or multipolygon. Construction validates ring
/// closure, vertex count and finiteness.
class Geometry {
public:
    static Geometry point(Point p);
    static Geometry polygon(Polygon poly);
    static Geometry multipolygon(std::vector<Polygon> parts);

    /// Convenience for tests and fixtures: axis-aligned rectangle.
    static Geometry rectangle(double min_x, double min_y, double max_x, double max_y);

    GeometryKind kind() const noexcept { return kind_; }
    bool is_point() const noexcept { return kind_ == GeometryKind::point; }

    /// Only valid for point geometries.
    const Point& as_point() const;

    /// Polygonal parts; a polygon yields one part, a point yields none.
    const std::vector<Polygon>& polygons() const noexcept { return parts_; }

    const BoundingBox& bounds() const noexcept { return bounds_; }

    friend bool operator==(const Geometry& a, const Geometry& b) {
        return a.kind_ == b.kind_ && a.point_ == b.point_ && a.parts_ == b.parts_;
    }

private:
    Geometry() = default;
    void compute_bounds();

    GeometryKind kind_ = GeometryKind::point;
    Point point_;
    std::vector<Polygon> parts_;
    BoundingBox bounds_{};
};

/// Parses POINT, POLYGON and MULTIPOLYGON. Keywords are case-insensitive and
/// an optional leading CRS IRI (GeoSPARQL wktLiteral form) is skipped.
/// Throws WktParseError or UnsupportedGeometryError.
Geometry parse_wkt(std::string_view text);

/// Canonical WKT with shortest round-trip coordinate formatting.
std::string to_wkt(const Geometry& g);

nlohmann::json to_geojson(const Geometry& g);

enum class Location { interior, boundary, exterior };

/// Position of `p` relative to `g`. For a point geometry, coincidence within
/// kEpsilon counts as interior (a point has no boundary).
Location locate(Point p, const Geometry& g);

/// Topological touches: interiors disjoint and the geometries intersect.
/// Throws PredicateDomainError for two points.
bool touches(const Geometry& a, const Geometry& b);

/// Planar distance; 0 when `p` is inside or on `g`.
double distance(Point p, const Geometry& g);

/// Unsigned area (holes subtracted).
double area(const Geometry& g);

/// Area-weighted centroid. Throws DegenerateGeometryError for zero area.
Point centroid(const Geometry& g);

} // namespace covkg::geo
