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

#ifndef BARBIE_KMS_SECRET_CRYPTO_H_
#define BARBIE_KMS_SECRET_CRYPTO_H_

#include <string>
#include <string_view>

#include "barbie/common/bytes.h"
#include "barbie/common/random.h"
#include "barbie/common/status.h"
#include "barbie/store/store.h"

namespace barbie::kms {

// At-rest protection for secret payloads. Ciphertexts are bound to the
// project_id; Decrypt fails with kIntegrityViolation under any other project.
class SecretCrypto {
 public:
  virtual ~SecretCrypto() = default;
  virtual std::string_view name() const = 0;
  virtual StatusOr<Bytes> Encrypt(std::string_view project_id, ByteSpan plaintext) = 0;
  virtual StatusOr<Bytes> Decrypt(std::string_view project_id, ByteSpan ciphertext) = 0;
  virtual StatusOr<Digest> Tag(ByteSpan data) = 0;
};

// Software-only backend with a configured 32-byte key and no enclave, the
// counterpart of Barbican's simple_crypto plugin.
class SoftwareSecretCrypto final : public SecretCrypto {
 public:
  explicit SoftwareSecretCrypto(ByteArray<32> key, RandomSource& rng = DefaultRandom());
  std::string_view name() const override { return "simple_crypto"; }
  StatusOr<Bytes> Encrypt(std::string_view project_id, ByteSpan plaintext) override;
  StatusOr<Bytes> Decrypt(std::string_view project_id, ByteSpan ciphertext) override;
  StatusOr<Digest> Tag(ByteSpan data) override;

 private:
  ByteArray<32> key_;
  ByteArray<32> tag_key_;
  RandomSource& rng_;
};

// v1 secret storage over any backend. Access is by project only.
class LegacySecrets {
 public:
  LegacySecrets(store::Store store, SecretCrypto& crypto, RandomSource& rng = DefaultRandom())
      : store_(std::move(store)), crypto_(crypto), rng_(rng) {}

  StatusOr<std::string> Store(std::string_view token, std::string_view project_id,
                              ByteSpan plaintext, std::string_view name,
                              std::string_view content_type);
  // kNotFound, kAccessDenied (other project or not a v1 secret),
  // kIntegrityViolation.
  StatusOr<Bytes> Retrieve(std::string_view project_id, std::string_view ref_id);

 private:
  store::Store store_;
  SecretCrypto& crypto_;
  RandomSource& rng_;
};

// Fresh 16-byte reference, hex-encoded.
std::string NewRefId(RandomSource& rng);

}  // namespace barbie::kms

#endif  // BARBIE_KMS_SECRET_CRYPTO_H_
