#include "lgd/task_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgd/error.hpp"

namespace lgd {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

[[noreturn]] void fail(std::size_t index, const std::string& field, const std::string& what) {
  throw ParseError("task " + std::to_string(index) + ", field '" + field + "': " + what);
}

const json& field(const json& obj, std::size_t index, const char* name) {
  if (!obj.contains(name)) fail(index, name, "missing");
  return obj.at(name);
}

Index read_count(const json& obj, std::size_t index, const char* name) {
  const json& v = field(obj, index, name);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(index, name, "expected a non-negative integer");
  return static_cast<Index>(v.get<long long>());
}

Vector read_vector(const json& v, std::size_t index, const char* name, Index expected) {
  if (!v.is_array()) fail(index, name, "expected an array");
  if (static_cast<Index>(v.size()) != expected) {
    fail(index, name, "length " + std::to_string(v.size()) + " does not match header " + std::to_string(expected));
  }
  Vector out(expected);
  for (Index i = 0; i < expected; ++i) {
    if (!v[i].is_number()) fail(index, name, "entry " + std::to_string(i) + " is not a number");
    out[i] = v[i].get<double>();
  }
  return out;
}

Matrix read_matrix(const json& v, std::size_t index, const char* name, Index rows, Index cols) {
  if (!v.is_array()) fail(index, name, "expected an array of rows");
  if (static_cast<Index>(v.size()) != rows) {
    fail(index, name, "has " + std::to_string(v.size()) + " rows, header says " + std::to_string(rows));
  }
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      fail(index, name, "row " + std::to_string(i) + " does not have " + std::to_string(cols) + " entries");
    }
    for (Index j = 0; j < cols; ++j) {
      if (!row[j].is_number()) fail(index, name, "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not a number");
      out(i, j) = row[j].get<double>();
    }
  }
  return out;
}

}  // namespace

std::string tasks_to_json_string(const std::vector<Task>& tasks) {
  json out = json::array();
  for (const Task& t : tasks) {
    t.validate();
    json obj;
    obj["d_x"] = t.d_x();
    obj["n"] = t.n();
    obj["n_v"] = t.n_v();
    obj["X"] = matrix_to_json(t.X);
    obj["y"] = vector_to_json(t.y);
    obj["Xv"] = matrix_to_json(t.Xv);
    obj["yv"] = vector_to_json(t.yv);
    obj["w_star"] = t.ground_truth ? vector_to_json(*t.ground_truth) : json(nullptr);
    out.push_back(std::move(obj));
  }
  return out.dump();
}

std::vector<Task> tasks_from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("task file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("task file: top level must be an array of tasks");
  std::vector<Task> tasks;
  tasks.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    if (!obj.is_object()) throw ParseError("task " + std::to_string(i) + ": expected an object");
    const Index d_x = read_count(obj, i, "d_x");
    const Index n = read_count(obj, i, "n");
    const Index n_v = read_count(obj, i, "n_v");
    Task t;
    t.X = read_matrix(field(obj, i, "X"), i, "X", n, d_x);
    t.y = read_vector(field(obj, i, "y"), i, "y", n);
    t.Xv = read_matrix(field(obj, i, "Xv"), i, "Xv", n_v, d_x);
    t.yv = read_vector(field(obj, i, "yv"), i, "yv", n_v);
    if (obj.contains("w_star") && !obj.at("w_star").is_null()) {
      const json& ws = obj.at("w_star");
      t.ground_truth = read_vector(ws, i, "w_star", ws.is_array() ? static_cast<Index>(ws.size()) : 0);
    }
    try {
      t.validate();
    } catch (const DimensionError& e) {
      throw ParseError("task " + std::to_string(i) + ": " + e.what());
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void save_tasks(const std::filesystem::path& path, const std::vector<Task>& tasks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << tasks_to_json_string(tasks) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<Task> load_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return tasks_from_json_string(buffer.str());
}

}  // namespace lgd
