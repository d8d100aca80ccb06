#include "bihar/field_io.hpp"

#include "bihar/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace bihar {

using nlohmann::json;

namespace {

json grid_json(const Grid& g) {
    json j;
    j["dim"] = g.dim;
    j["lo"] = std::vector<double>(g.lo.begin(), g.lo.begin() + g.dim);
    j["hi"] = std::vector<double>(g.hi.begin(), g.hi.begin() + g.dim);
    j["n_points"] = std::vector<int>(g.n.begin(), g.n.begin() + g.dim);
    return j;
}

Grid grid_from_json(const json& j) {
    Grid g;
    g.dim = j.at("dim").get<int>();
    auto lo = j.at("lo").get<std::vector<double>>();
    auto hi = j.at("hi").get<std::vector<double>>();
    auto n = j.at("n_points").get<std::vector<int>>();
    if (static_cast<int>(lo.size()) != g.dim || static_cast<int>(hi.size()) != g.dim ||
        static_cast<int>(n.size()) != g.dim)
        throw ValidationError("field header: extent arrays do not match dim");
    g.hi[2] = 0.0;
    g.n[2] = 1;
    for (int a = 0; a < g.dim; ++a) {
        g.lo[a] = lo[a];
        g.hi[a] = hi[a];
        g.n[a] = n[a];
    }
    g.validate();
    return g;
}

std::string leaf(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

std::string dir_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string() : path.substr(0, pos + 1);
}

}  // namespace

void write_components(const std::string& base, const Grid& g, const std::string& kind,
                      const std::vector<CVec>& comps, FieldEncoding enc) {
    for (const auto& c : comps)
        if (static_cast<std::size_t>(c.size()) != g.size())
            throw ShapeError("write_components: component size does not match grid");
    json h;
    h["grid"] = grid_json(g);
    h["kind"] = kind;
    h["components"] = comps.size();
    h["encoding"] = enc == FieldEncoding::binary ? "binary" : "csv";
    std::string data = base + (enc == FieldEncoding::binary ? ".bin" : ".csv");
    h["data"] = leaf(data);
    {
        std::ofstream out(base + ".json");
        if (!out) throw Error("cannot write " + base + ".json");
        out << h.dump(2) << "\n";
    }
    if (enc == FieldEncoding::binary) {
        std::ofstream out(data, std::ios::binary);
        if (!out) throw Error("cannot write " + data);
        for (const auto& c : comps)
            out.write(reinterpret_cast<const char*>(c.data()),
                      static_cast<std::streamsize>(c.size() * sizeof(cplx)));
        return;
    }
    std::ofstream out(data);
    if (!out) throw Error("cannot write " + data);
    out << std::setprecision(17);
    out << "node,x,y,z";
    for (std::size_t k = 0; k < comps.size(); ++k) out << ",re" << k << ",im" << k;
    out << "\n";
    for (std::size_t p = 0; p < g.size(); ++p) {
        Point x = g.point(p);
        out << p << "," << x[0] << "," << x[1] << "," << x[2];
        for (const auto& c : comps) out << "," << c[p].real() << "," << c[p].imag();
        out << "\n";
    }
}

ComponentFile read_components(const std::string& base) {
    std::ifstream in(base + ".json");
    if (!in) throw ValidationError("cannot open " + base + ".json");
    json h = json::parse(in);
    ComponentFile f;
    f.grid = grid_from_json(h.at("grid"));
    f.kind = h.at("kind").get<std::string>();
    const auto nc = h.at("components").get<std::size_t>();
    const std::string data = dir_of(base) + h.at("data").get<std::string>();
    const auto N = static_cast<Eigen::Index>(f.grid.size());
    f.comps.assign(nc, CVec::Zero(N));
    if (h.at("encoding").get<std::string>() == "binary") {
        std::ifstream bin(data, std::ios::binary);
        if (!bin) throw ValidationError("cannot open " + data);
        for (auto& c : f.comps) {
            bin.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(N * sizeof(cplx)));
            if (!bin) throw ValidationError(data + ": truncated field data");
        }
        return f;
    }
    std::ifstream csv(data);
    if (!csv) throw ValidationError("cannot open " + data);
    std::string line;
    std::getline(csv, line);
    for (Eigen::Index p = 0; p < N; ++p) {
        if (!std::getline(csv, line)) throw ValidationError(data + ": truncated field data");
        std::stringstream ss(line);
        std::string cell;
        for (int skip = 0; skip < 4; ++skip) std::getline(ss, cell, ',');
        for (auto& c : f.comps) {
            double re, im;
            std::getline(ss, cell, ',');
            re = std::stod(cell);
            std::getline(ss, cell, ',');
            im = std::stod(cell);
            c[p] = cplx(re, im);
        }
    }
    return f;
}

void write_field(const std::string& base, const ScalarField& f, FieldEncoding enc) {
    write_components(base, f.grid, "scalar", {f.v}, enc);
}

void write_field(const std::string& base, const VectorField& f, FieldEncoding enc) {
    std::vector<CVec> c(f.c.begin(), f.c.begin() + f.grid.dim);
    write_components(base, f.grid, "vector", c, enc);
}

void write_field(const std::string& base, const SymMatrixField& f, FieldEncoding enc) {
    std::vector<CVec> c;
    for (int j = 0; j < f.grid.dim; ++j)
        for (int k = j; k < f.grid.dim; ++k) c.push_back(f.at(j, k));
    write_components(base, f.grid, "sym_matrix", c, enc);
}

ScalarField read_scalar_field(const std::string& base) {
    ComponentFile f = read_components(base);
    if (f.kind != "scalar" || f.comps.size() != 1)
        throw ValidationError(base + ": not a scalar field");
    return {f.grid, f.comps[0]};
}

}  // namespace bihar
