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

#ifndef BARBIE_ENCLAVE_ENCLAVE_SIM_H_
#define BARBIE_ENCLAVE_ENCLAVE_SIM_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "barbie/common/bytes.h"
#include "barbie/common/random.h"
#include "barbie/common/status.h"
#include "barbie/crypto/crypto.h"

// Software stand-in for an SGX platform: measured enclave loading, locally
// MACed reports, quotes signed by a per-platform quoting authority, and
// sealing keyed to enclave identity plus a platform secret.
namespace barbie::enclave {

inline constexpr size_t kReportDataSize = 64;
inline constexpr size_t kCpuSvnSize = 16;
inline constexpr size_t kReportMacSize = 16;

using ReportData = ByteArray<kReportDataSize>;
using CpuSvn = ByteArray<kCpuSvnSize>;

struct EnclaveIdentity {
  Digest mr_enclave{};
  Digest mr_signer{};
  uint16_t isv_svn = 0;
  CpuSvn cpu_svn{};

  static constexpr size_t kSerializedSize = 32 + 32 + 2 + kCpuSvnSize;

  Bytes Serialize() const;
  static StatusOr<EnclaveIdentity> Parse(ByteSpan data);

  friend bool operator==(const EnclaveIdentity&, const EnclaveIdentity&) = default;
};

struct Report {
  EnclaveIdentity identity;
  ReportData report_data{};
  ByteArray<kReportMacSize> mac{};

  static constexpr size_t kBodySize = EnclaveIdentity::kSerializedSize + kReportDataSize;
  static constexpr size_t kSerializedSize = kBodySize + kReportMacSize;

  // identity || report_data, the part covered by the MAC.
  Bytes SerializeBody() const;
  Bytes Serialize() const;
  static StatusOr<Report> Parse(ByteSpan data);

  friend bool operator==(const Report&, const Report&) = default;
};

struct Quote {
  Report report;
  ByteArray<crypto::kEd25519SignatureSize> signature{};

  static constexpr size_t kSerializedSize =
      Report::kSerializedSize + crypto::kEd25519SignatureSize;

  Bytes Serialize() const;
  static StatusOr<Quote> Parse(ByteSpan data);

  friend bool operator==(const Quote&, const Quote&) = default;
};

// Secrets of one simulated machine. Immutable once built.
struct PlatformState {
  ByteArray<32> seal_root{};
  ByteArray<16> report_key{};
  crypto::Ed25519KeyPair quoting_authority;
  CpuSvn cpu_svn{};

  static PlatformState Generate(RandomSource& rng = DefaultRandom());

  const ByteArray<32>& authority_public_key() const {
    return quoting_authority.public_key;
  }
};

// JSON file with base64 fields: seal_root, report_key, authority_seed,
// authority_public_key, cpu_svn.
Status SavePlatform(const PlatformState& platform, const std::filesystem::path& path);
StatusOr<PlatformState> LoadPlatform(const std::filesystem::path& path);

// Reads just the authority public key, either from a full platform file or
// from a file holding only {"authority_public_key": ...}.
StatusOr<ByteArray<32>> LoadAuthorityPublicKey(const std::filesystem::path& path);
Status SaveAuthorityPublicKey(const PlatformState& platform,
                              const std::filesystem::path& path);

class EnclaveHandle {
 public:
  const EnclaveIdentity& identity() const { return identity_; }
  const PlatformState& platform() const { return *platform_; }
  const std::shared_ptr<const PlatformState>& shared_platform() const {
    return platform_;
  }

 private:
  friend StatusOr<EnclaveHandle> LoadEnclave(ByteSpan, ByteSpan, uint16_t,
                                             std::shared_ptr<const PlatformState>);
  EnclaveHandle(EnclaveIdentity identity, std::shared_ptr<const PlatformState> platform)
      : identity_(identity), platform_(std::move(platform)) {}

  EnclaveIdentity identity_;
  std::shared_ptr<const PlatformState> platform_;
};

// mr_enclave = SHA-256(manifest), mr_signer = SHA-256(signer_public_key).
StatusOr<EnclaveHandle> LoadEnclave(ByteSpan manifest, ByteSpan signer_public_key,
                                    uint16_t isv_svn,
                                    std::shared_ptr<const PlatformState> platform);

// `report_data` must be exactly 64 bytes.
StatusOr<Report> CreateReport(const EnclaveHandle& enclave, ByteSpan report_data);

bool VerifyReportMac(const Report& report, const PlatformState& platform);

// The quoting enclave only signs reports MACed on its own platform.
StatusOr<Quote> QuoteReport(const Report& report, const PlatformState& platform);

StatusOr<EnclaveIdentity> VerifyQuote(const Quote& quote, ByteSpan authority_public_key);

enum class SealPolicy : uint8_t { kByMeasurement = 1, kBySigner = 2 };

std::string_view SealPolicyName(SealPolicy policy);

struct SealedBlob {
  SealPolicy policy = SealPolicy::kByMeasurement;
  Digest bound_field{};  // mr_enclave or mr_signer, per policy
  uint16_t isv_svn = 0;
  CpuSvn cpu_svn{};
  Bytes ciphertext;  // iv || ciphertext || tag

  Bytes Header() const;
  std::string ToJson() const;
  static StatusOr<SealedBlob> FromJson(std::string_view json);
};

// HKDF-SHA-256, salt = seal_root, info = policy tag || selected identity
// field || isv_svn || cpu_svn.
ByteArray<32> DeriveSealKey(const EnclaveHandle& enclave, SealPolicy policy);

SealedBlob Seal(const EnclaveHandle& enclave, ByteSpan plaintext, SealPolicy policy,
                RandomSource& rng = DefaultRandom());

// kUnsealDenied on identity/platform mismatch or tag failure.
StatusOr<Bytes> Unseal(const EnclaveHandle& enclave, const SealedBlob& blob);

}  // namespace barbie::enclave

#endif  // BARBIE_ENCLAVE_ENCLAVE_SIM_H_
