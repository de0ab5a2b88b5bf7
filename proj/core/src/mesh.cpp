#include "binpick/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace binpick {

double TriangleMesh::total_area() const {
  double a = 0.0;
  for (size_t i = 0; i < triangles.size(); ++i) a += triangle_area(i);
  return a;
}

Aabb TriangleMesh::aabb() const {
  Aabb box;
  for (const auto& v : vertices) box.expand(v);
  return box;
}

Vec3 TriangleMesh::centroid() const {
  Vec3 acc = Vec3::Zero();
  double area = 0.0;
  for (size_t i = 0; i < triangles.size(); ++i) {
    const auto tri = triangle(i);
    const double a = triangle_area(i);
    acc += a * (tri[0] + tri[1] + tri[2]) / 3.0;
    area += a;
  }
  return area > 0.0 ? Vec3(acc / area) : Vec3::Zero();
}

TriangleMesh TriangleMesh::transformed(const Pose& pose) const {
  TriangleMesh out = *this;
  for (auto& v : out.vertices) v = pose * v;
  const Mat3 r = pose.rotation.matrix();
  for (auto& n : out.normals) n = r * n;
  return out;
}

void TriangleMesh::recompute_normals() {
  normals.resize(triangles.size());
  for (size_t i = 0; i < triangles.size(); ++i) {
    const auto tri = triangle(i);
    normals[i] = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
  }
}

size_t TriangleMesh::drop_degenerate(double area_eps) {
  std::vector<std::array<uint32_t, 3>> kept;
  kept.reserve(triangles.size());
  for (const auto& t : triangles) {
    if (t[0] >= vertices.size() || t[1] >= vertices.size() || t[2] >= vertices.size()) continue;
    const Vec3 e1 = vertices[t[1]] - vertices[t[0]];
    const Vec3 e2 = vertices[t[2]] - vertices[t[0]];
    if (0.5 * e1.cross(e2).norm() <= area_eps) continue;
    kept.push_back(t);
  }
  const size_t removed = triangles.size() - kept.size();
  triangles = std::move(kept);
  recompute_normals();
  return removed;
}

namespace {

float read_f32(const std::string& d, size_t off) {
  float v;
  std::memcpy(&v, d.data() + off, 4);  // STL is little-endian, as is this target
  return v;
}

uint32_t read_u32(const std::string& d, size_t off) {
  uint32_t v;
  std::memcpy(&v, d.data() + off, 4);
  return v;
}

bool looks_binary_stl(const std::string& data) {
  if (data.size() < 84) return false;
  const uint32_t n = read_u32(data, 80);
  if (data.size() == 84 + size_t(n) * 50) return true;
  // Some exporters pad ASCII files that still start with "solid"; trust the
  // size check first, then the keyword.
  std::string head = data.substr(0, std::min<size_t>(data.size(), 6));
  for (auto& c : head) c = char(std::tolower(uint8_t(c)));
  return head.rfind("solid", 0) != 0;
}

TriangleMesh parse_stl_binary(const std::string& data) {
  if (data.size() < 84) throw ParseError("binary STL truncated header", data.size());
  const uint32_t n = read_u32(data, 80);
  if (data.size() < 84 + size_t(n) * 50)
    throw ParseError("binary STL truncated facets", data.size());
  TriangleMesh m;
  m.vertices.reserve(size_t(n) * 3);
  m.triangles.reserve(n);
  size_t off = 84;
  for (uint32_t i = 0; i < n; ++i) {
    off += 12;  // stored normal untrusted
    std::array<uint32_t, 3> tri;
    for (int v = 0; v < 3; ++v) {
      m.vertices.emplace_back(read_f32(data, off), read_f32(data, off + 4), read_f32(data, off + 8));
      tri[v] = uint32_t(m.vertices.size() - 1);
      off += 12;
    }
    m.triangles.push_back(tri);
    off += 2;  // attribute byte count
  }
  return m;
}

TriangleMesh parse_stl_ascii(const std::string& data) {
  TriangleMesh m;
  std::istringstream in(data);
  std::string tok;
  std::vector<Vec3> facet;
  while (in >> tok) {
    if (tok == "vertex") {
      Vec3 v;
      if (!(in >> v.x() >> v.y() >> v.z()))
        throw ParseError("ASCII STL bad vertex", size_t(in.tellg() == -1 ? data.size() : size_t(in.tellg())));
      facet.push_back(v);
    } else if (tok == "endfacet") {
      if (facet.size() != 3)
        throw ParseError("ASCII STL facet without 3 vertices",
                         size_t(in.tellg() == -1 ? data.size() : size_t(in.tellg())));
      const uint32_t base = uint32_t(m.vertices.size());
      m.vertices.insert(m.vertices.end(), facet.begin(), facet.end());
      m.triangles.push_back({base, base + 1, base + 2});
      facet.clear();
    }
  }
  return m;
}

TriangleMesh parse_obj_impl(const std::string& data) {
  TriangleMesh m;
  std::istringstream in(data);
  std::string line;
  size_t offset = 0;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) throw ParseError("OBJ bad vertex record", line_start);
      m.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string f;
      while (ls >> f) {
        // "i", "i/t", "i/t/n", "i//n" — only the vertex index matters here.
        const size_t slash = f.find('/');
        long i = 0;
        try {
          i = std::stol(slash == std::string::npos ? f : f.substr(0, slash));
        } catch (const std::exception&) {
          throw ParseError("OBJ bad face index '" + f + "'", line_start);
        }
        if (i == 0) throw ParseError("OBJ face index 0", line_start);
        const long resolved = i > 0 ? i - 1 : long(m.vertices.size()) + i;
        if (resolved < 0 || size_t(resolved) >= m.vertices.size())
          throw ParseError("OBJ face index out of range", line_start);
        idx.push_back(resolved);
      }
      if (idx.size() < 3) throw ParseError("OBJ face with < 3 vertices", line_start);
      for (size_t k = 1; k + 1 < idx.size(); ++k)  // fan triangulation
        m.triangles.push_back({uint32_t(idx[0]), uint32_t(idx[k]), uint32_t(idx[k + 1])});
    }
    // all other record types ignored
  }
  return m;
}

void finalize(TriangleMesh& m) {
  m.drop_degenerate();
  if (m.triangles.empty()) throw EmptyMesh("mesh has no non-degenerate triangles");
}

}  // namespace

TriangleMesh parse_stl(const std::string& data) {
  TriangleMesh m = looks_binary_stl(data) ? parse_stl_binary(data) : parse_stl_ascii(data);
  finalize(m);
  return m;
}

TriangleMesh parse_obj(const std::string& data) {
  TriangleMesh m = parse_obj_impl(data);
  finalize(m);
  return m;
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (format == MeshFormat::Auto) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = char(std::tolower(uint8_t(c)));
    format = ext == "obj" ? MeshFormat::Obj : MeshFormat::Stl;
  }
  return format == MeshFormat::Obj ? parse_obj(data) : parse_stl(data);
}

void save_stl(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path);
  char header[80] = {0};
  std::snprintf(header, sizeof(header), "binary stl");
  out.write(header, 80);
  const uint32_t n = uint32_t(mesh.triangle_count());
  out.write(reinterpret_cast<const char*>(&n), 4);
  for (size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto tri = mesh.triangle(i);
    float rec[12] = {
        float(mesh.normals[i].x()), float(mesh.normals[i].y()), float(mesh.normals[i].z()),
        float(tri[0].x()), float(tri[0].y()), float(tri[0].z()),
        float(tri[1].x()), float(tri[1].y()), float(tri[1].z()),
        float(tri[2].x()), float(tri[2].y()), float(tri[2].z())};
    out.write(reinterpret_cast<const char*>(rec), 48);
    const uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
}

}  // namespace binpick
