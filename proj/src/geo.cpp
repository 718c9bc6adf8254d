#include "covkg/geo.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>

namespace covkg::geo {

namespace {

struct Segment {
    Point a;
    Point b;
};

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Parameter of the projection of p onto segment s, clamped to [0, 1].
double project_param(Point p, const Segment& s) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return 0.0;
    const double t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    return std::clamp(t, 0.0, 1.0);
}

Point lerp(const Segment& s, double t) {
    return {s.a.x + (s.b.x - s.a.x) * t, s.a.y + (s.b.y - s.a.y) * t};
}

double point_segment_distance(Point p, const Segment& s) {
    return dist(p, lerp(s, project_param(p, s)));
}

bool segments_intersect(const Segment& s, const Segment& t) {
    const double d1 = cross(t.a, t.b, s.a);
    const double d2 = cross(t.a, t.b, s.b);
    const double d3 = cross(s.a, s.b, t.a);
    const double d4 = cross(s.a, s.b, t.b);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double segment_distance(const Segment& s, const Segment& t) {
    if (segments_intersect(s, t)) return 0.0;
    return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                     point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

std::vector<Segment> edges_of(const Geometry& g) {
    std::vector<Segment> out;
    for (const auto& poly : g.polygons()) {
        for (const auto& ring : poly.rings) {
            for (std::size_t i = 0; i + 1 < ring.size(); ++i) out.push_back({ring[i], ring[i + 1]});
        }
    }
    return out;
}

/// Even-odd test against one polygon (exterior plus holes).
bool inside_polygon(Point p, const Polygon& poly) {
    bool inside = false;
    for (const auto& ring : poly.rings) {
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
            const Point& a = ring[i];
            const Point& b = ring[j];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
                if (p.x < x) inside = !inside;
            }
        }
    }
    return inside;
}

Location locate_polygonal(Point p, const Geometry& g, const std::vector<Segment>& edges) {
    for (const auto& e : edges) {
        if (point_segment_distance(p, e) <= kEpsilon) return Location::boundary;
    }
    for (const auto& poly : g.polygons()) {
        if (inside_polygon(p, poly)) return Location::interior;
    }
    return Location::exterior;
}

bool boxes_overlap(const BoundingBox& a, const BoundingBox& b) {
    return a.min_x <= b.max_x + kEpsilon && b.min_x <= a.max_x + kEpsilon &&
           a.min_y <= b.max_y + kEpsilon && b.min_y <= a.max_y + kEpsilon;
}

/// True when some point of the interior of `a` lies in the interior of `b`,
/// found by walking `a`'s boundary split at every contact with `b`.
bool boundary_enters_interior(const Geometry& a, const std::vector<Segment>& a_edges,
                              const Geometry& b, const std::vector<Segment>& b_edges) {
    for (const auto& e : a_edges) {
        const double len = dist(e.a, e.b);
        if (len <= kEpsilon) continue;

        std::vector<double> cuts{0.0, 1.0};
        for (const auto& f : b_edges) {
            if (segment_distance(e, f) > kEpsilon) continue;
            // Contact points: endpoints of f lying on e, endpoints of e lying on f,
            // and the proper crossing point if any.
            for (Point q : {f.a, f.b}) {
                const double t = project_param(q, e);
                if (dist(lerp(e, t), q) <= kEpsilon) cuts.push_back(t);
            }
            if (segments_intersect(e, f)) {
                const double d1 = cross(f.a, f.b, e.a);
                const double d2 = cross(f.a, f.b, e.b);
                cuts.push_back(d1 / (d1 - d2));
            }
        }
        std::sort(cuts.begin(), cuts.end());

        const Point normal{-(e.b.y - e.a.y) / len, (e.b.x - e.a.x) / len};
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double piece = (cuts[i + 1] - cuts[i]) * len;
            if (piece <= kEpsilon) continue;
            const Point mid = lerp(e, 0.5 * (cuts[i] + cuts[i + 1]));
            const Location where = locate_polygonal(mid, b, b_edges);
            if (where == Location::interior) return true;
            if (where == Location::boundary) {
                // Shared boundary piece: the interiors meet when both lie on the same side.
                const double delta = std::clamp(0.01 * piece, 1e-7, 1e-4);
                for (double side : {1.0, -1.0}) {
                    const Point probe{mid.x + side * delta * normal.x, mid.y + side * delta * normal.y};
                    if (locate_polygonal(probe, a, a_edges) == Location::interior &&
                        locate_polygonal(probe, b, b_edges) == Location::interior) {
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// WKT reader
// ---------------------------------------------------------------------------

class WktReader {
public:
    explicit WktReader(std::string_view text) : text_(text) {}

    Geometry read() {
        skip_ws();
        if (peek() == '<') {
            // GeoSPARQL literals may start with a CRS IRI.
            while (pos_ < text_.size() && text_[pos_] != '>') ++pos_;
            if (pos_ == text_.size()) fail("unterminated CRS IRI");
            ++pos_;
            skip_ws();
        }
        const std::size_t word_start = pos_;
        std::string word = keyword();
        if (word.empty()) fail("expected geometry type");
        Geometry g = [&] {
            if (word == "POINT") {
                expect('(');
                Point p = coordinate();
                expect(')');
                return Geometry::point(p);
            }
            if (word == "POLYGON") return Geometry::polygon(polygon());
            if (word == "MULTIPOLYGON") {
                std::vector<Polygon> parts;
                expect('(');
                do {
                    parts.push_back(polygon());
                } while (accept(','));
                expect(')');
                return Geometry::multipolygon(std::move(parts));
            }
            static constexpr std::string_view kKnown[] = {"LINESTRING", "MULTIPOINT", "MULTILINESTRING",
                                                          "GEOMETRYCOLLECTION", "TRIANGLE", "TIN",
                                                          "POLYHEDRALSURFACE", "CIRCULARSTRING"};
            if (std::find(std::begin(kKnown), std::end(kKnown), word) != std::end(kKnown)) {
                throw UnsupportedGeometryError("unsupported WKT geometry type " + word);
            }
            pos_ = word_start;
            fail("unknown geometry type '" + word + "'");
        }();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return g;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw WktParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string keyword() {
        std::string out;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_])));
            ++pos_;
        }
        return out;
    }

    double number() {
        skip_ws();
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        if (first != last && *first == '+') ++first;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{}) fail("expected number");
        if (!std::isfinite(value)) fail("non-finite coordinate");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    Point coordinate() {
        Point p;
        p.x = number();
        p.y = number();
        return p;
    }

    Ring ring() {
        const std::size_t start = pos_;
        expect('(');
        Ring r;
        do {
            r.push_back(coordinate());
        } while (accept(','));
        expect(')');
        if (r.size() < 4) throw WktParseError(start, "ring needs at least 4 vertices");
        if (!(r.front() == r.back())) throw WktParseError(start, "ring is not closed");
        return r;
    }

    Polygon polygon() {
        Polygon poly;
        expect('(');
        do {
            poly.rings.push_back(ring());
        } while (accept(','));
        expect(')');
        return poly;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void append_number(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

void append_ring(std::string& out, const Ring& r) {
    out += '(';
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ", ";
        append_number(out, r[i].x);
        out += ' ';
        append_number(out, r[i].y);
    }
    out += ')';
}

void append_polygon(std::string& out, const Polygon& p) {
    out += '(';
    for (std::size_t i = 0; i < p.rings.size(); ++i) {
        if (i) out += ", ";
        append_ring(out, p.rings[i]);
    }
    out += ')';
}

nlohmann::json rings_json(const Polygon& p) {
    auto rings = nlohmann::json::array();
    for (const auto& r : p.rings) {
        auto coords = nlohmann::json::array();
        for (const auto& pt : r) coords.push_back({pt.x, pt.y});
        rings.push_back(std::move(coords));
    }
    return rings;
}

void validate_ring(const Ring& r) {
    if (r.size() < 4) throw ValidationError("ring needs at least 4 vertices");
    if (!(r.front() == r.back())) throw ValidationError("ring is not closed");
    for (const auto& p : r) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError("non-finite coordinate");
    }
}

void validate_polygon(const Polygon& p) {
    if (p.rings.empty()) throw ValidationError("polygon without rings");
    for (const auto& r : p.rings) validate_ring(r);
}

/// Signed shoelace area and centroid accumulators of one ring.
void ring_moments(const Ring& r, double& a2, double& cx6, double& cy6) {
    a2 = cx6 = cy6 = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double c = r[i].x * r[i + 1].y - r[i + 1].x * r[i].y;
        a2 += c;
        cx6 += (r[i].x + r[i + 1].x) * c;
        cy6 += (r[i].y + r[i + 1].y) * c;
    }
}

} // namespace

Geometry Geometry::point(Point p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError("non-finite coordinate");
    Geometry g;
    g.kind_ = GeometryKind::point;
    g.point_ = p;
    g.compute_bounds();
    return g;
}

Geometry Geometry::polygon(Polygon poly) {
    validate_polygon(poly);
    Geometry g;
    g.kind_ = GeometryKind::polygon;
    g.parts_.push_back(std::move(poly));
    g.compute_bounds();
    return g;
}

Geometry Geometry::multipolygon(std::vector<Polygon> parts) {
    if (parts.empty()) throw ValidationError("multipolygon without parts");
    for (const auto& p : parts) validate_polygon(p);
    Geometry g;
    g.kind_ = GeometryKind::multipolygon;
    g.parts_ = std::move(parts);
    g.compute_bounds();
    return g;
}

Geometry Geometry::rectangle(double min_x, double min_y, double max_x, double max_y) {
    return polygon(Polygon{{Ring{{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}, {min_x, min_y}}}});
}

const Point& Geometry::as_point() const {
    if (kind_ != GeometryKind::point) throw ValidationError("geometry is not a point");
    return point_;
}

void Geometry::compute_bounds() {
    if (kind_ == GeometryKind::point) {
        bounds_ = {point_.x, point_.y, point_.x, point_.y};
        return;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    bounds_ = {inf, inf, -inf, -inf};
    for (const auto& poly : parts_) {
        for (const auto& p : poly.rings.front()) {
            bounds_.min_x = std::min(bounds_.min_x, p.x);
            bounds_.min_y = std::min(bounds_.min_y, p.y);
            bounds_.max_x = std::max(bounds_.max_x, p.x);
            bounds_.max_y = std::max(bounds_.max_y, p.y);
        }
    }
}

Geometry parse_wkt(std::string_view text) {
    return WktReader(text).read();
}

std::string to_wkt(const Geometry& g) {
    std::string out;
    switch (g.kind()) {
    case GeometryKind::point:
        out = "POINT (";
        append_number(out, g.as_point().x);
        out += ' ';
        append_number(out, g.as_point().y);
        out += ')';
        break;
    case GeometryKind::polygon:
        out = "POLYGON ";
        append_polygon(out, g.polygons().front());
        break;
    case GeometryKind::multipolygon:
        out = "MULTIPOLYGON (";
        for (std::size_t i = 0; i < g.polygons().size(); ++i) {
            if (i) out += ", ";
            append_polygon(out, g.polygons()[i]);
        }
        out += ')';
        break;
    }
    return out;
}

nlohmann::json to_geojson(const Geometry& g) {
    switch (g.kind()) {
    case GeometryKind::point:
        return {{"type", "Point"}, {"coordinates", {g.as_point().x, g.as_point().y}}};
    case GeometryKind::polygon:
        return {{"type", "Polygon"}, {"coordinates", rings_json(g.polygons().front())}};
    case GeometryKind::multipolygon: {
        auto parts = nlohmann::json::array();
        for (const auto& p : g.polygons()) parts.push_back(rings_json(p));
        return {{"type", "MultiPolygon"}, {"coordinates", std::move(parts)}};
    }
    }
    return {};
}

Location locate(Point p, const Geometry& g) {
    if (g.is_point()) return dist(p, g.as_point()) <= kEpsilon ? Location::interior : Location::exterior;
    return locate_polygonal(p, g, edges_of(g));
}

bool touches(const Geometry& a, const Geometry& b) {
    if (a.is_point() && b.is_point()) throw PredicateDomainError("touches is undefined for two points");
    if (!boxes_overlap(a.bounds(), b.bounds())) return false;
    if (a.is_point()) return locate(a.as_point(), b) == Location::boundary;
    if (b.is_point()) return locate(b.as_point(), a) == Location::boundary;

    const auto a_edges = edges_of(a);
    const auto b_edges = edges_of(b);

    bool boundaries_meet = false;
    for (const auto& e : a_edges) {
        for (const auto& f : b_edges) {
            if (segment_distance(e, f) <= kEpsilon) {
                boundaries_meet = true;
                break;
            }
        }
        if (boundaries_meet) break;
    }
    if (!boundaries_meet) return false;

    return !boundary_enters_interior(a, a_edges, b, b_edges) && !boundary_enters_interior(b, b_edges, a, a_edges);
}

double distance(Point p, const Geometry& g) {
    if (g.is_point()) return dist(p, g.as_point());
    const auto edges = edges_of(g);
    if (locate_polygonal(p, g, edges) != Location::exterior) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : edges) best = std::min(best, point_segment_distance(p, e));
    return best;
}

double area(const Geometry& g) {
    double total = 0.0;
    for (const auto& poly : g.polygons()) {
        for (std::size_t i = 0; i < poly.rings.size(); ++i) {
            double a2, cx, cy;
            ring_moments(poly.rings[i], a2, cx, cy);
            total += (i == 0 ? 0.5 : -0.5) * std::abs(a2);
        }
    }
    return total;
}

Point centroid(const Geometry& g) {
    double weight = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& poly : g.polygons()) {
        for (std::size_t i = 0; i < poly.rings.size(); ++i) {
            double a2, cx6, cy6;
            ring_moments(poly.rings[i], a2, cx6, cy6);
            if (a2 == 0.0) continue;
            // Ring centroid is orientation independent; only the weight sign matters.
            const double ring_area = (i == 0 ? 0.5 : -0.5) * std::abs(a2);
            sx += ring_area * (cx6 / (3.0 * a2));
            sy += ring_area * (cy6 / (3.0 * a2));
            weight += ring_area;
        }
    }
    if (std::abs(weight) <= kEpsilon * kEpsilon) throw DegenerateGeometryError("geometry has zero area");
    return {sx / weight, sy / weight};
}

} // namespace covkg::geo
