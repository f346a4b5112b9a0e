// Copyright 2026 The BarbiE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "barbie/enclave/enclave_sim.h"

#include <nlohmann/json.hpp>

#include "barbie/common/file_util.h"

namespace barbie::enclave {

using nlohmann::json;

namespace {

constexpr std::string_view kSealIkm = "barbie-seal-key";

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>((p[0] << 8) | p[1]);
}

template <size_t N>
void CopyOut(const uint8_t* src, ByteArray<N>& dst) {
  std::copy(src, src + N, dst.begin());
}

Digest ReportMac(const Report& report, const PlatformState& platform) {
  return crypto::HmacSha256(platform.report_key, report.SerializeBody());
}

template <size_t N>
StatusOr<ByteArray<N>> B64Field(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_string()) {
    return MakeError(ErrorCode::kInvalidArgument, std::string("missing field ") + name);
  }
  BARBIE_ASSIGN_OR_RETURN(Bytes raw, Base64Decode(j[name].get<std::string>()));
  return ToArray<N>(raw);
}

}  // namespace

Bytes EnclaveIdentity::Serialize() const {
  Bytes out = Concat(mr_enclave, mr_signer);
  AppendU16(out, isv_svn);
  out.insert(out.end(), cpu_svn.begin(), cpu_svn.end());
  return out;
}

StatusOr<EnclaveIdentity> EnclaveIdentity::Parse(ByteSpan data) {
  if (data.size() != kSerializedSize) {
    return MakeError(ErrorCode::kProtocolError, "bad identity length");
  }
  EnclaveIdentity id;
  const uint8_t* p = data.data();
  CopyOut(p, id.mr_enclave);
  CopyOut(p + 32, id.mr_signer);
  id.isv_svn = ReadU16(p + 64);
  CopyOut(p + 66, id.cpu_svn);
  return id;
}

Bytes Report::SerializeBody() const {
  return Concat(identity.Serialize(), report_data);
}

Bytes Report::Serialize() const { return Concat(SerializeBody(), mac); }

StatusOr<Report> Report::Parse(ByteSpan data) {
  if (data.size() != kSerializedSize) {
    return MakeError(ErrorCode::kProtocolError, "bad report length");
  }
  Report r;
  BARBIE_ASSIGN_OR_RETURN(r.identity, EnclaveIdentity::Parse(
                                          data.first(EnclaveIdentity::kSerializedSize)));
  CopyOut(data.data() + EnclaveIdentity::kSerializedSize, r.report_data);
  CopyOut(data.data() + kBodySize, r.mac);
  return r;
}

Bytes Quote::Serialize() const { return Concat(report.Serialize(), signature); }

StatusOr<Quote> Quote::Parse(ByteSpan data) {
  if (data.size() != kSerializedSize) {
    return MakeError(ErrorCode::kProtocolError, "bad quote length");
  }
  Quote q;
  BARBIE_ASSIGN_OR_RETURN(q.report, Report::Parse(data.first(Report::kSerializedSize)));
  CopyOut(data.data() + Report::kSerializedSize, q.signature);
  return q;
}

PlatformState PlatformState::Generate(RandomSource& rng) {
  PlatformState p;
  p.seal_root = rng.Array<32>();
  p.report_key = rng.Array<16>();
  p.quoting_authority = crypto::Ed25519Generate(rng);
  p.cpu_svn = rng.Array<kCpuSvnSize>();
  return p;
}

Status SavePlatform(const PlatformState& platform, const std::filesystem::path& path) {
  json j = {
      {"seal_root", Base64Encode(platform.seal_root)},
      {"report_key", Base64Encode(platform.report_key)},
      {"authority_seed", Base64Encode(platform.quoting_authority.seed)},
      {"authority_public_key", Base64Encode(platform.quoting_authority.public_key)},
      {"cpu_svn", Base64Encode(platform.cpu_svn)},
  };
  return WriteFileAtomic(path, j.dump(2) + "\n");
}

StatusOr<PlatformState> LoadPlatform(const std::filesystem::path& path) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorCode::kInvalidArgument, "platform file is not a JSON object");
  }
  PlatformState p;
  BARBIE_ASSIGN_OR_RETURN(p.seal_root, B64Field<32>(j, "seal_root"));
  BARBIE_ASSIGN_OR_RETURN(p.report_key, B64Field<16>(j, "report_key"));
  BARBIE_ASSIGN_OR_RETURN(auto seed, B64Field<32>(j, "authority_seed"));
  BARBIE_ASSIGN_OR_RETURN(p.cpu_svn, B64Field<kCpuSvnSize>(j, "cpu_svn"));
  p.quoting_authority = crypto::Ed25519FromSeed(seed);
  if (j.contains("authority_public_key")) {
    BARBIE_ASSIGN_OR_RETURN(auto pub, B64Field<32>(j, "authority_public_key"));
    if (pub != p.quoting_authority.public_key) {
      return MakeError(ErrorCode::kInvalidArgument,
                       "authority_public_key does not match authority_seed");
    }
  }
  return p;
}

StatusOr<ByteArray<32>> LoadAuthorityPublicKey(const std::filesystem::path& path) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorCode::kInvalidArgument, "authority file is not a JSON object");
  }
  return B64Field<32>(j, "authority_public_key");
}

Status SaveAuthorityPublicKey(const PlatformState& platform,
                              const std::filesystem::path& path) {
  json j = {{"authority_public_key", Base64Encode(platform.authority_public_key())}};
  return WriteFileAtomic(path, j.dump(2) + "\n");
}

StatusOr<EnclaveHandle> LoadEnclave(ByteSpan manifest, ByteSpan signer_public_key,
                                    uint16_t isv_svn,
                                    std::shared_ptr<const PlatformState> platform) {
  if (manifest.empty()) {
    return MakeError(ErrorCode::kInvalidArgument, "enclave manifest is empty");
  }
  if (!platform) {
    return MakeError(ErrorCode::kInvalidArgument, "no platform");
  }
  EnclaveIdentity id;
  id.mr_enclave = crypto::Sha256(manifest);
  id.mr_signer = crypto::Sha256(signer_public_key);
  id.isv_svn = isv_svn;
  id.cpu_svn = platform->cpu_svn;
  return EnclaveHandle(id, std::move(platform));
}

StatusOr<Report> CreateReport(const EnclaveHandle& enclave, ByteSpan report_data) {
  if (report_data.size() != kReportDataSize) {
    return MakeError(ErrorCode::kInvalidArgument, "report_data must be 64 bytes");
  }
  Report r;
  r.identity = enclave.identity();
  std::copy(report_data.begin(), report_data.end(), r.report_data.begin());
  Digest mac = ReportMac(r, enclave.platform());
  std::copy(mac.begin(), mac.begin() + kReportMacSize, r.mac.begin());
  return r;
}

bool VerifyReportMac(const Report& report, const PlatformState& platform) {
  Digest mac = ReportMac(report, platform);
  return SecureEquals(ByteSpan(mac.data(), kReportMacSize), report.mac);
}

StatusOr<Quote> QuoteReport(const Report& report, const PlatformState& platform) {
  if (!VerifyReportMac(report, platform)) {
    return MakeError(ErrorCode::kReportRejected, "report was not produced on this platform");
  }
  Quote q;
  q.report = report;
  q.signature = crypto::Ed25519Sign(platform.quoting_authority.seed, report.Serialize());
  return q;
}

StatusOr<EnclaveIdentity> VerifyQuote(const Quote& quote, ByteSpan authority_public_key) {
  if (!crypto::Ed25519Verify(authority_public_key, quote.report.Serialize(),
                             quote.signature)) {
    return MakeError(ErrorCode::kAttestationFailed, "quote signature does not verify");
  }
  return quote.report.identity;
}

std::string_view SealPolicyName(SealPolicy policy) {
  return policy == SealPolicy::kBySigner ? "BY_SIGNER" : "BY_MEASUREMENT";
}

Bytes SealedBlob::Header() const {
  Bytes out{static_cast<uint8_t>(policy)};
  out.insert(out.end(), bound_field.begin(), bound_field.end());
  AppendU16(out, isv_svn);
  out.insert(out.end(), cpu_svn.begin(), cpu_svn.end());
  return out;
}

std::string SealedBlob::ToJson() const {
  json j = {
      {"seal_policy", SealPolicyName(policy)},
      {"bound_field", Base64Encode(bound_field)},
      {"isv_svn", isv_svn},
      {"cpu_svn", Base64Encode(cpu_svn)},
      {"ciphertext", Base64Encode(ciphertext)},
  };
  return j.dump();
}

StatusOr<SealedBlob> SealedBlob::FromJson(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("seal_policy") ||
      !j["seal_policy"].is_string() || !j.contains("isv_svn") ||
      !j["isv_svn"].is_number_unsigned() || !j.contains("ciphertext") ||
      !j["ciphertext"].is_string()) {
    return MakeError(ErrorCode::kInvalidArgument, "malformed sealed blob");
  }
  SealedBlob blob;
  std::string policy = j["seal_policy"].get<std::string>();
  if (policy == "BY_MEASUREMENT") {
    blob.policy = SealPolicy::kByMeasurement;
  } else if (policy == "BY_SIGNER") {
    blob.policy = SealPolicy::kBySigner;
  } else {
    return MakeError(ErrorCode::kInvalidArgument, "unknown seal policy");
  }
  uint64_t svn = j["isv_svn"].get<uint64_t>();
  if (svn > 0xffff) return MakeError(ErrorCode::kInvalidArgument, "isv_svn out of range");
  blob.isv_svn = static_cast<uint16_t>(svn);
  BARBIE_ASSIGN_OR_RETURN(blob.bound_field, B64Field<32>(j, "bound_field"));
  BARBIE_ASSIGN_OR_RETURN(blob.cpu_svn, B64Field<kCpuSvnSize>(j, "cpu_svn"));
  BARBIE_ASSIGN_OR_RETURN(blob.ciphertext, Base64Decode(j["ciphertext"].get<std::string>()));
  return blob;
}

namespace {

SealedBlob BlobHeaderFor(const EnclaveHandle& enclave, SealPolicy policy) {
  const EnclaveIdentity& id = enclave.identity();
  SealedBlob blob;
  blob.policy = policy;
  blob.bound_field = policy == SealPolicy::kBySigner ? id.mr_signer : id.mr_enclave;
  blob.isv_svn = id.isv_svn;
  blob.cpu_svn = id.cpu_svn;
  return blob;
}

}  // namespace

ByteArray<32> DeriveSealKey(const EnclaveHandle& enclave, SealPolicy policy) {
  SealedBlob header = BlobHeaderFor(enclave, policy);
  Bytes info = ToBytes(SealPolicyName(policy));
  info.insert(info.end(), header.bound_field.begin(), header.bound_field.end());
  AppendU16(info, header.isv_svn);
  info.insert(info.end(), header.cpu_svn.begin(), header.cpu_svn.end());
  Bytes key = crypto::HkdfSha256(AsBytes(kSealIkm), enclave.platform().seal_root, info, 32);
  ByteArray<32> out;
  std::copy(key.begin(), key.end(), out.begin());
  return out;
}

SealedBlob Seal(const EnclaveHandle& enclave, ByteSpan plaintext, SealPolicy policy,
                RandomSource& rng) {
  SealedBlob blob = BlobHeaderFor(enclave, policy);
  ByteArray<32> key = DeriveSealKey(enclave, policy);
  // A 32-byte key cannot be rejected.
  blob.ciphertext = crypto::AeadSeal(key, plaintext, blob.Header(), rng).value();
  return blob;
}

StatusOr<Bytes> Unseal(const EnclaveHandle& enclave, const SealedBlob& blob) {
  SealedBlob expected = BlobHeaderFor(enclave, blob.policy);
  if (expected.Header() != blob.Header()) {
    return MakeError(ErrorCode::kUnsealDenied, "blob is bound to a different enclave identity");
  }
  ByteArray<32> key = DeriveSealKey(enclave, blob.policy);
  auto plain = crypto::AeadOpen(key, blob.ciphertext, blob.Header());
  if (!plain.ok()) {
    return MakeError(ErrorCode::kUnsealDenied, "seal key mismatch or corrupted blob");
  }
  return std::move(plain).value();
}

}  // namespace barbie::enclave
