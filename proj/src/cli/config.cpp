#include "nsmooth/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace nsmooth::cli {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "must be an object");
}

void allow_keys(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError(join(path, it.key()), "unknown field");
    }
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

double positive(const Json& j, const std::string& path) {
  const double x = number(j, path);
  if (!(x > 0.0)) throw ConfigError(path, "must be positive");
  return x;
}

double nonnegative(const Json& j, const std::string& path) {
  const double x = number(j, path);
  if (x < 0.0) throw ConfigError(path, "must be non-negative");
  return x;
}

long long integer(const Json& j, const std::string& path, long long lo, long long hi) {
  if (!j.is_number_integer()) throw ConfigError(path, "must be an integer");
  const long long v = j.get<long long>();
  if (v < lo || v > hi) {
    throw ConfigError(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "must be true or false");
  return j.get<bool>();
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& path, std::size_t min_size) {
  if (!j.is_array()) throw ConfigError(path, "must be an array of numbers");
  if (j.size() < min_size) throw ConfigError(path, "needs at least " + std::to_string(min_size) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
  return out;
}

const Json* find(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <class F>
void optional_field(const Json& j, const std::string& path, const char* key, F&& apply) {
  if (const Json* v = find(j, key)) apply(*v, join(path, key));
}

const Json& required(const Json& j, const std::string& path, const char* key) {
  const Json* v = find(j, key);
  if (!v) throw ConfigError(join(path, key), "is required");
  return *v;
}

Manifold parse_manifold(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path, {"kind", "dim", "radius", "periods"});
  const std::string kind = text(required(j, path, "kind"), join(path, "kind"));
  try {
    if (kind == "euclidean") {
      allow_keys(j, path, {"kind", "dim"});
      return Manifold::euclidean(static_cast<int>(integer(required(j, path, "dim"), join(path, "dim"), 1, kMaxCoords)));
    }
    if (kind == "sphere") {
      allow_keys(j, path, {"kind", "dim", "radius"});
      const int dim = static_cast<int>(integer(required(j, path, "dim"), join(path, "dim"), 1, kMaxCoords - 1));
      double radius = 1.0;
      optional_field(j, path, "radius", [&](const Json& v, const std::string& p) { radius = positive(v, p); });
      return Manifold::sphere(dim, radius);
    }
    if (kind == "torus") {
      allow_keys(j, path, {"kind", "periods"});
      const std::string p = join(path, "periods");
      const std::vector<double> periods = numbers(required(j, path, "periods"), p, 1);
      if (periods.size() > static_cast<std::size_t>(kMaxCoords)) throw ConfigError(p, "too many periods");
      for (std::size_t i = 0; i < periods.size(); ++i) {
        if (!(periods[i] > 0.0)) throw ConfigError(index(p, i), "must be positive");
      }
      return Manifold::flat_torus(periods);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "kind"), "must be one of euclidean, sphere, torus");
}

Point parse_point(const Manifold& M, const Json& j, const std::string& path) {
  const std::vector<double> c = numbers(j, path, 1);
  if (static_cast<int>(c.size()) != M.coord_dim()) {
    throw ConfigError(path, "needs " + std::to_string(M.coord_dim()) + " coordinates");
  }
  Vec v(M.coord_dim());
  for (int i = 0; i < M.coord_dim(); ++i) v[i] = c[i];
  try {
    return M.point(v);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

struct ParsedField {
  std::optional<ScalarField> scalar;
  std::optional<MapField> map;
  std::optional<Point> base_point;
  std::optional<std::vector<Point>> singular;
};

ParsedField parse_field(const Manifold& M, const Json& j, const std::string& path) {
  require_object(j, path);
  ParsedField out;
  if (const Json* op = find(j, "op")) {
    const std::string name = text(*op, join(path, "op"));
    auto sub = [&](const Json& s, const std::string& p) {
      ParsedField f = parse_field(M, s, p);
      if (!f.scalar) throw ConfigError(p, "compositions accept scalar fields only");
      return *f.scalar;
    };
    if (name == "scale") {
      allow_keys(j, path, {"op", "c", "field"});
      const double c = number(required(j, path, "c"), join(path, "c"));
      out.scalar = catalog::scale(sub(required(j, path, "field"), join(path, "field")), c);
      return out;
    }
    if (name == "add" || name == "max" || name == "min") {
      allow_keys(j, path, {"op", "fields"});
      const Json& list = required(j, path, "fields");
      const std::string lp = join(path, "fields");
      if (!list.is_array() || list.size() < 2) throw ConfigError(lp, "must be an array of at least 2 fields");
      ScalarField acc = sub(list[0], index(lp, 0));
      for (std::size_t i = 1; i < list.size(); ++i) {
        const ScalarField next = sub(list[i], index(lp, i));
        acc = name == "add" ? catalog::add(acc, next) : name == "max" ? catalog::max(acc, next) : catalog::min(acc, next);
      }
      out.scalar = acc;
      return out;
    }
    throw ConfigError(join(path, "op"), "must be one of scale, add, max, min");
  }

  const std::string name = text(required(j, path, "name"), join(path, "name"));
  auto get = [&](const char* key, double fallback, bool must_be_positive) {
    double v = fallback;
    optional_field(j, path, key, [&](const Json& x, const std::string& p) { v = must_be_positive ? positive(x, p) : number(x, p); });
    return v;
  };
  try {
    if (name == "dist-to-point") {
      allow_keys(j, path, {"name", "point"});
      const Point p = parse_point(M, required(j, path, "point"), join(path, "point"));
      out.scalar = catalog::dist_to_point(M, p);
      out.base_point = p;
      out.singular = catalog::dist_singular_set(M, p);
    } else if (name == "height") {
      allow_keys(j, path, {"name"});
      if (M.kind() != ManifoldKind::Sphere) throw ConfigError(join(path, "name"), "height needs a sphere");
      out.scalar = catalog::height(M);
      Vec top = Vec::Zero(M.coord_dim());
      top[M.coord_dim() - 1] = M.radius();
      out.singular = std::vector<Point>{M.point(top), M.point(-top)};
    } else if (name == "abs-max" || name == "x2sin") {
      allow_keys(j, path, {"name", "box"});
      if (!(M == Manifold::euclidean(1))) throw ConfigError(join(path, "name"), name + " needs euclidean dim 1");
      const double box = get("box", name == "abs-max" ? 5.0 : 1.0, true);
      out.scalar = name == "abs-max" ? catalog::abs_max(box) : catalog::x2sin(box);
      if (name == "abs-max") out.singular = std::vector<Point>{M.point({1.0})};
    } else if (name == "double-bump") {
      allow_keys(j, path, {"name", "a"});
      if (M.kind() != ManifoldKind::Sphere || M.dim() != 2) {
        throw ConfigError(join(path, "name"), "double-bump needs sphere dim 2");
      }
      const double a = get("a", 1.0, true);
      out.scalar = catalog::double_bump(M, a);
      const double R = M.radius();
      std::vector<Point> s{M.point({0.0, 0.0, R}), M.point({0.0, 0.0, -R})};
      // Critical points off the poles exist when 2 a R > 1: z = 1 / (2a).
      const double z = 1.0 / (2.0 * a);
      if (z < R) {
        const double x = std::sqrt(R * R - z * z);
        s.push_back(M.point({x, 0.0, z}));
        s.push_back(M.point({-x, 0.0, z}));
      }
      out.singular = s;
    } else if (name == "affine") {
      allow_keys(j, path, {"name", "slope", "offset"});
      if (M.kind() != ManifoldKind::Euclidean) throw ConfigError(join(path, "name"), "affine needs euclidean space");
      const std::string sp = join(path, "slope");
      const std::vector<double> a = numbers(required(j, path, "slope"), sp, 1);
      if (static_cast<int>(a.size()) != M.dim()) throw ConfigError(sp, "needs " + std::to_string(M.dim()) + " entries");
      Vec slope(M.dim());
      for (int i = 0; i < M.dim(); ++i) slope[i] = a[i];
      out.scalar = catalog::affine(M, slope, get("offset", 0.0, false));
      if (slope.norm() > 0.0) out.singular = std::vector<Point>{};
    } else if (name == "angle" || name == "pwl-wobble") {
      if (M.kind() != ManifoldKind::FlatTorus) throw ConfigError(join(path, "name"), name + " needs a torus");
      const double radius = get("target_radius", 1.0, true);
      if (name == "angle") {
        allow_keys(j, path, {"name", "target_radius", "windings"});
        int windings = 1;
        optional_field(j, path, "windings", [&](const Json& v, const std::string& p) {
          windings = static_cast<int>(integer(v, p, 1, 1000));
        });
        out.map = catalog::angle(M, radius, windings);
      } else {
        allow_keys(j, path, {"name", "target_radius", "a", "b"});
        if (M.dim() < 2) throw ConfigError(join(path, "name"), "pwl-wobble needs a torus of dim >= 2");
        const double a = get("a", 0.3, false);
        const double b = get("b", 0.3, false);
        out.map = catalog::pwl_wobble(M, radius, a, b);
        if (std::abs(a) + std::abs(b) < 1.0) out.singular = std::vector<Point>{};
      }
      if (name == "angle") out.singular = std::vector<Point>{};
    } else {
      throw ConfigError(join(path, "name"), "unknown catalog field '" + name + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return out;
}

Grid default_grid(const Manifold& M, double box) {
  if (M.kind() == ManifoldKind::Sphere && M.dim() == 2) return latlong_grid(M, 11, 18);
  std::vector<int> counts(M.dim(), M.dim() == 1 ? 200 : M.dim() == 2 ? 64 : 6);
  return product_grid(M, counts, box);
}

Grid parse_grid(const Manifold& M, const Json& j, const std::string& path, double box) {
  require_object(j, path);
  const std::string kind = text(required(j, path, "kind"), join(path, "kind"));
  try {
    if (kind == "latlong") {
      allow_keys(j, path, {"kind", "rings", "sectors"});
      if (M.kind() != ManifoldKind::Sphere || M.dim() != 2) throw ConfigError(join(path, "kind"), "latlong needs sphere dim 2");
      const int rings = static_cast<int>(integer(required(j, path, "rings"), join(path, "rings"), 1, 2000));
      const int sectors = static_cast<int>(integer(required(j, path, "sectors"), join(path, "sectors"), 3, 4000));
      return latlong_grid(M, rings, sectors);
    }
    if (kind == "fibonacci") {
      allow_keys(j, path, {"kind", "n"});
      if (M.kind() != ManifoldKind::Sphere || M.dim() != 2) throw ConfigError(join(path, "kind"), "fibonacci needs sphere dim 2");
      return fibonacci_grid(M, static_cast<int>(integer(required(j, path, "n"), join(path, "n"), 4, 1000000)));
    }
    if (kind == "product") {
      allow_keys(j, path, {"kind", "counts"});
      const std::string cp = join(path, "counts");
      const Json& c = required(j, path, "counts");
      if (!c.is_array() || static_cast<int>(c.size()) != M.dim()) {
        throw ConfigError(cp, "needs one count per dimension (" + std::to_string(M.dim()) + ")");
      }
      std::vector<int> counts;
      for (std::size_t i = 0; i < c.size(); ++i) counts.push_back(static_cast<int>(integer(c[i], index(cp, i), 2, 100000)));
      return product_grid(M, counts, box);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(join(path, "kind"), "must be one of latlong, fibonacci, product");
}

}  // namespace

RunConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override) {
  require_object(doc, "");
  allow_keys(doc, "", {"schema_version", "description", "manifold", "field", "grid", "seed", "clarke", "smoothing",
                       "epsilon_ladder", "probe", "fibrate", "reeb", "smooth"});
  RunConfig cfg;
  cfg.raw = doc;
  const long long version = integer(required(doc, "", "schema_version"), "schema_version", 0, 1000);
  if (version != kSchemaVersion) throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
  optional_field(doc, "", "description", [](const Json& v, const std::string& p) { text(v, p); });

  optional_field(doc, "", "seed", [&](const Json& v, const std::string& p) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(p, "must be a non-negative integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  });
  if (seed_override) cfg.seed = *seed_override;

  optional_field(doc, "", "smoothing", [&](const Json& v, const std::string& p) {
    require_object(v, p);
    allow_keys(v, p, {"cover_radius", "radial", "angular", "monte_carlo_points", "box"});
    optional_field(v, p, "cover_radius", [&](const Json& x, const std::string& q) { cfg.smoothing.cover_radius = nonnegative(x, q); });
    optional_field(v, p, "radial", [&](const Json& x, const std::string& q) {
      cfg.smoothing.quadrature.radial = static_cast<int>(integer(x, q, 1, 64));
    });
    optional_field(v, p, "angular", [&](const Json& x, const std::string& q) {
      cfg.smoothing.quadrature.angular = static_cast<int>(integer(x, q, 2, 256));
    });
    optional_field(v, p, "monte_carlo_points", [&](const Json& x, const std::string& q) {
      cfg.smoothing.quadrature.monte_carlo_points = static_cast<int>(integer(x, q, 16, 1000000));
    });
    optional_field(v, p, "box", [&](const Json& x, const std::string& q) { cfg.smoothing.box = positive(x, q); });
  });
  cfg.smoothing.quadrature.seed = cfg.seed;

  cfg.manifold = parse_manifold(required(doc, "", "manifold"), "manifold");
  const Manifold& M = *cfg.manifold;
  ParsedField field = parse_field(M, required(doc, "", "field"), "field");
  cfg.scalar = std::move(field.scalar);
  cfg.map = std::move(field.map);
  cfg.base_point = std::move(field.base_point);
  cfg.known_singular_set = std::move(field.singular);

  if (const Json* g = find(doc, "grid")) {
    cfg.grid = parse_grid(M, *g, "grid", cfg.smoothing.box);
  } else {
    cfg.grid = default_grid(M, cfg.smoothing.box);
  }

  optional_field(doc, "", "clarke", [&](const Json& v, const std::string& p) {
    require_object(v, p);
    allow_keys(v, p, {"samples_per_radius", "rungs", "r0", "tol_sing", "kink_ratio", "direction_count", "geodesic_cap"});
    ClarkeParams& c = cfg.clarke;
    optional_field(v, p, "samples_per_radius", [&](const Json& x, const std::string& q) {
      c.samples_per_radius = static_cast<int>(integer(x, q, 2, 100000));
    });
    optional_field(v, p, "rungs", [&](const Json& x, const std::string& q) { c.rungs = static_cast<int>(integer(x, q, 1, 20)); });
    optional_field(v, p, "r0", [&](const Json& x, const std::string& q) { c.r0 = nonnegative(x, q); });
    optional_field(v, p, "tol_sing", [&](const Json& x, const std::string& q) { c.tol_sing = positive(x, q); });
    optional_field(v, p, "kink_ratio", [&](const Json& x, const std::string& q) { c.kink_ratio = positive(x, q); });
    optional_field(v, p, "direction_count", [&](const Json& x, const std::string& q) {
      c.direction_count = static_cast<int>(integer(x, q, 2, 100000));
    });
    optional_field(v, p, "geodesic_cap", [&](const Json& x, const std::string& q) {
      c.geodesic_cap = static_cast<int>(integer(x, q, 1, 100000));
    });
    if (c.r0 > 0.0 && c.r0 >= M.convexity_radius()) throw ConfigError(join(p, "r0"), "must be below the convexity radius");
  });
  cfg.clarke.seed = cfg.seed;

  optional_field(doc, "", "epsilon_ladder", [&](const Json& v, const std::string& p) {
    if (!v.is_array() || v.empty()) throw ConfigError(p, "must be a non-empty array of numbers");
    cfg.ladder.clear();
    for (std::size_t i = 0; i < v.size(); ++i) cfg.ladder.push_back(positive(v[i], index(p, i)));
  });

  optional_field(doc, "", "probe", [&](const Json& v, const std::string& p) {
    require_object(v, p);
    allow_keys(v, p, {"points"});
    const std::string pp = join(p, "points");
    const Json& pts = required(v, p, "points");
    if (!pts.is_array() || pts.empty()) throw ConfigError(pp, "must be a non-empty array of points");
    for (std::size_t i = 0; i < pts.size(); ++i) cfg.probe_points.push_back(parse_point(M, pts[i], index(pp, i)));
  });

  optional_field(doc, "", "fibrate", [&](const Json& v, const std::string& p) {
    require_object(v, p);
    allow_keys(v, p, {"eta", "sigma_tol", "full_ladder"});
    optional_field(v, p, "eta", [&](const Json& x, const std::string& q) { cfg.fibrate.eta = positive(x, q); });
    optional_field(v, p, "sigma_tol", [&](const Json& x, const std::string& q) { cfg.fibrate.sigma_tol = nonnegative(x, q); });
    optional_field(v, p, "full_ladder", [&](const Json& x, const std::string& q) { cfg.fibrate.full_ladder = boolean(x, q); });
  });

  optional_field(doc, "", "reeb", [&](const Json& v, const std::string& p) {
    require_object(v, p);
    allow_keys(v, p, {"c", "band", "eps", "lipschitz_pairs", "shrink"});
    ReebSpec& r = cfg.reeb;
    r.c = number(required(v, p, "c"), join(p, "c"));
    const std::string bp = join(p, "band");
    const std::vector<double> band = numbers(required(v, p, "band"), bp, 2);
    if (band.size() != 2) throw ConfigError(bp, "must hold exactly [b1, b2]");
    if (!(band[0] < r.c && r.c < band[1])) throw ConfigError(bp, "must satisfy b1 < c < b2");
    r.b1 = band[0];
    r.b2 = band[1];
    optional_field(v, p, "eps", [&](const Json& x, const std::string& q) { r.eps = positive(x, q); });
    optional_field(v, p, "lipschitz_pairs", [&](const Json& x, const std::string& q) {
      r.lipschitz_pairs = static_cast<int>(integer(x, q, 1000, 10000000));
    });
    optional_field(v, p, "shrink", [&](const Json& x, const std::string& q) {
      r.shrink = numbers(x, q, 1);
      for (std::size_t i = 0; i < r.shrink.size(); ++i) {
        if (!(r.shrink[i] > 0.0 && r.shrink[i] < 0.5)) throw ConfigError(index(q, i), "must lie in (0, 0.5)");
      }
    });
  });

  optional_field(doc, "", "smooth", [&](const Json& v, const std::string& p) {
    require_object(v, p);
    allow_keys(v, p, {"lipschitz_pairs", "region", "slack"});
    optional_field(v, p, "lipschitz_pairs", [&](const Json& x, const std::string& q) {
      cfg.smooth.lipschitz_pairs = static_cast<int>(integer(x, q, 1000, 10000000));
    });
    optional_field(v, p, "slack", [&](const Json& x, const std::string& q) { cfg.smooth.slack = nonnegative(x, q); });
    optional_field(v, p, "region", [&](const Json& x, const std::string& q) {
      require_object(x, q);
      allow_keys(x, q, {"coordinate", "min", "max"});
      RegionSpec r;
      r.coordinate = static_cast<int>(integer(required(x, q, "coordinate"), join(q, "coordinate"), 0, M.coord_dim() - 1));
      r.min = number(required(x, q, "min"), join(q, "min"));
      r.max = number(required(x, q, "max"), join(q, "max"));
      if (!(r.min <= r.max)) throw ConfigError(join(q, "max"), "must be >= min");
      cfg.smooth.region = r;
    });
  });
  return cfg;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, seed_override);
}

}  // namespace nsmooth::cli
