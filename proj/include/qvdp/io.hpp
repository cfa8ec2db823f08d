#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvdp/params.hpp"
#include "qvdp/spectral.hpp"
#include "qvdp/types.hpp"

namespace qvdp::io {

using json = nlohmann::ordered_json;

std::string version();

json params_json(const ModelParams& params);
// Header common to every artifact: tool name, version, parameters and extras.
json provenance(const std::string& producer, const ModelParams& params, const json& extra = json::object());

// Writes to a sibling temp file, then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// CSV with a single '#'-prefixed JSON header line, then column names, then rows.
class CsvTable {
public:
    CsvTable(json header, std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    json header_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Round-trip exact decimal.
std::string num(double x);
std::string num(long x);
std::string num(int x);

// Parses a CSV written by CsvTable: returns header JSON, column names and the rows.
struct ParsedCsv {
    json header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
ParsedCsv read_csv(const std::filesystem::path& path);

// {params, cutoff, eigenvalues: [[re, im, parity], ...]} plus provenance.
json spectrum_json(const SpectralDecomposition& dec, const json& prov);

// Binary sidecar of mode matrices: for each listed mode, the d x d right mode in
// row-major order as (re, im) little-endian float64 pairs, then the left mode.
// Returns a JSON descriptor of the layout.
json write_mode_sidecar(const std::filesystem::path& path, const SpectralDecomposition& dec,
                        const std::vector<int>& modes);
// Reads one matrix (side 0 = right, 1 = left) of entry k back from a sidecar.
CMatrix read_mode_sidecar(const std::filesystem::path& path, int d, int entry, int side);

}  // namespace qvdp::io
