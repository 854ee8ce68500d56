//! Precomputed binary expansions of the supported transcendental constants.
//!
//! Each table holds `floor(c * 2^4096)` in hexadecimal. Enclosures finer than
//! 4096 bits fall back to series evaluation in `rho::constant`.

pub(crate) const TABLE_BITS: u32 = 4096;

pub(crate) const PI_HEX: &str = concat!(
    "3243f6a8885a308d313198a2e03707344a4093822299f31d0082efa98ec4e6c8",
    "9452821e638d01377be5466cf34e90c6cc0ac29b7c97c50dd3f84d5b5b547091",
    "79216d5d98979fb1bd1310ba698dfb5ac2ffd72dbd01adfb7b8e1afed6a267e9",
    "6ba7c9045f12c7f9924a19947b3916cf70801f2e2858efc16636920d871574e6",
    "9a458fea3f4933d7e0d95748f728eb658718bcd5882154aee7b54a41dc25a59b",
    "59c30d5392af26013c5d1b023286085f0ca417918b8db38ef8e79dcb0603a180",
    "e6c9e0e8bb01e8a3ed71577c1bd314b2778af2fda55605c60e65525f3aa55ab9",
    "45748986263e8144055ca396a2aab10b6b4cc5c341141e8cea15486af7c72e99",
    "3b3ee1411636fbc2a2ba9c55d741831f6ce5c3e169b87931eafd6ba336c24cf5",
    "c7a325381289586773b8f48986b4bb9afc4bfe81b6628219361d809ccfb21a99",
    "1487cac605dec8032ef845d5de98575b1dc262302eb651b8823893e81d396acc",
    "50f6d6ff383f442392e0b4482a484200469c8f04a9e1f9b5e21c66842f6e96c9",
    "a670c9c61abd388f06a51a0d2d8542f68960fa728ab5133a36eef0b6c137a3be",
    "4ba3bf0507efb2a98a1f1651d39af017666ca593e82430e888cee8619456f9fb",
    "47d84a5c33b8b5ebee06f75d885c12073401a449f56c16aa64ed3aa62363f770",
    "61bfedf72429b023d37d0d724d00a1248db0fead349f1c09b075372c980991b7",
    "b",
);

pub(crate) const E_HEX: &str = concat!(
    "2b7e151628aed2a6abf7158809cf4f3c762e7160f38b4da56a784d9045190cfe",
    "f324e7738926cfbe5f4bf8d8d8c31d763da06c80abb1185eb4f7c7b5757f5958",
    "490cfd47d7c19bb42158d9554f7b46bced55c4d79fd5f24d6613c31c3839a2dd",
    "f8a9a276bcfbfa1c877c56284dab79cd4c2b3293d20e9e5eaf02ac60acc93ed8",
    "74422a52ecb238feee5ab6add835fd1a0753d0a8f78e537d2b95bb79d8dcaec6",
    "42c1e9f23b829b5c2780bf38737df8bb300d01334a0d0bd8645cbfa73a6160ff",
    "e393c48cbbbca060f0ff8ec6d31beb5cceed7f2f0bb088017163bc60df45a0ec",
    "b1bcd289b06cbbfea21ad08e1847f3f7378d56ced94640d6ef0d3d37be67008e",
    "186d1bf275b9b241deb64749a47dfdfb96632c3eb061b6472bbf84c26144e49c",
    "2d04c324ef10de513d3f5114b8b5d374d93cb8879c7d52ffd72ba0aae7277da7",
    "ba1b4af1488d8e836af14865e6c37ab6876fe690b571121382af341afe94f77b",
    "cf06c83b8ff5675f0979074ad9a787bc5b9bd4b0c5937d3ede4c3a79396215ed",
    "ab1f57d0b5a7db461dd8f3c75540d00121fd56e95f8c731e9c4d7221bbed0c62",
    "bb5a87804b679a0caa41d802a4604c311b71de3e5c6b400e024a6668ccf2e2de",
    "86876e4f5c50000f0a93b3aa7e6342b302a0a47373b25f73e3b26d569fe2291a",
    "d36d6a147d1060b871a2801f9783764082ff592d9140db1e9399df4b0e14ca8e",
    "8",
);
