#include "qvdp/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "qvdp/error.hpp"

namespace qvdp::io {

namespace fs = std::filesystem;

std::string version() { return std::string("qvdp ") + QVDP_VERSION; }

json params_json(const ModelParams& p) {
    json j;
    j["gamma1"] = p.gamma1;
    j["gamma2"] = p.gamma2;
    j["delta"] = p.delta;
    j["eta"] = p.eta;
    j["omega_s"] = p.omega_s;
    j["n_ex"] = p.n_ex();
    j["delta_ratio"] = p.delta / p.gamma1;
    j["eta_ratio"] = p.eta_c() > 0.0 ? json(p.eta_ratio()) : json(nullptr);
    return j;
}

json provenance(const std::string& producer, const ModelParams& params, const json& extra) {
    json j;
    j["producer"] = producer;
    j["version"] = version();
    j["params"] = params_json(params);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

void write_atomic(const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot rename onto " + path.string());
    }
}

std::string num(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}
std::string num(long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

CsvTable::CsvTable(json header, std::vector<std::string> columns)
    : header_(std::move(header)), columns_(std::move(columns)) {
    header_["columns"] = columns_;
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw Error(ErrorKind::InvalidArgument, "CSV row width mismatch");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    os << "# " << header_.dump() << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
    return os.str();
}

void CsvTable::write(const fs::path& path) const { write_atomic(path, str()); }

ParsedCsv read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    ParsedCsv out;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw Error(ErrorKind::Io, path.string() + " lacks a provenance header");
    out.header = json::parse(line.substr(2));
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        return cells;
    };
    if (!std::getline(in, line)) throw Error(ErrorKind::Io, path.string() + " lacks a column line");
    out.columns = split(line);
    while (std::getline(in, line))
        if (!line.empty()) out.rows.push_back(split(line));
    return out;
}

json spectrum_json(const SpectralDecomposition& dec, const json& prov) {
    json j = prov;
    j["params"] = params_json(dec.params);
    j["cutoff"] = dec.cutoff;
    json ev = json::array();
    for (const auto& m : dec.modes) ev.push_back({m.lambda.real(), m.lambda.imag(), m.parity});
    j["eigenvalues"] = ev;
    return j;
}

namespace {

static_assert(std::endian::native == std::endian::little, "sidecar writer assumes a little-endian host");

void append_row_major(std::string& buf, const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double re = m(i, j).real(), im = m(i, j).imag();
            buf.append(reinterpret_cast<const char*>(&re), sizeof re);
            buf.append(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

}  // namespace

json write_mode_sidecar(const fs::path& path, const SpectralDecomposition& dec, const std::vector<int>& modes) {
    const int d = dec.cutoff;
    std::string buf;
    buf.reserve(modes.size() * 2 * d * d * 16);
    json listed = json::array();
    for (int j : modes) {
        const EigenMode& m = dec.modes.at(j);
        if (!m.right || !m.left) throw Error(ErrorKind::InvalidArgument, "mode " + std::to_string(j) + " has no vectors");
        append_row_major(buf, *m.right);
        append_row_major(buf, *m.left);
        listed.push_back(j);
    }
    write_atomic(path, buf);
    json desc;
    desc["file"] = path.filename().string();
    desc["dim"] = d;
    desc["modes"] = listed;
    desc["layout"] = "per mode: right then left, d*d row-major complex128 (re, im) little-endian";
    return desc;
}

CMatrix read_mode_sidecar(const fs::path& path, int d, int entry, int side) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    const std::streamoff block = static_cast<std::streamoff>(d) * d * 16;
    in.seekg(block * (2 * entry + side));
    CMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), sizeof re);
            in.read(reinterpret_cast<char*>(&im), sizeof im);
            m(i, j) = Complex(re, im);
        }
    if (!in) throw Error(ErrorKind::Io, "sidecar too short: " + path.string());
    return m;
}

}  // namespace qvdp::io
