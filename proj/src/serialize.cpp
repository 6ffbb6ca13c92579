#include "sdlab/serialize.hpp"

namespace sdlab {

using nlohmann::json;

json mlp_to_json(const Mlp& m) {
    json j;
    j["widths"] = m.widths;
    j["act"] = m.act == Act::relu ? "relu" : "tanh";
    json ws = json::array(), bs = json::array();
    for (const Tensor& w : m.weights) ws.push_back(w.data);
    for (const Tensor& b : m.biases) bs.push_back(b.data);
    j["weights"] = std::move(ws);
    j["biases"] = std::move(bs);
    return j;
}

Mlp mlp_from_json(const json& j) {
    Mlp m;
    m.widths = j.at("widths").get<std::vector<int>>();
    m.act = j.at("act").get<std::string>() == "tanh" ? Act::tanh : Act::relu;
    const auto& ws = j.at("weights");
    const auto& bs = j.at("biases");
    require(ws.size() + 1 == m.widths.size() && bs.size() == ws.size(),
            "snapshot: layer count mismatch");
    for (size_t l = 0; l + 1 < m.widths.size(); ++l) {
        const int in = m.widths[l], out = m.widths[l + 1];
        Tensor w({in, out}, ws[l].get<std::vector<double>>());
        Tensor b({out}, bs[l].get<std::vector<double>>());
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    return m;
}

}  // namespace sdlab
