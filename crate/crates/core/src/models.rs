//! Built-in DNN model tables.
//!
//! Layer sequences for the evaluated CNNs and a transformer proxy, built with
//! automatic shape propagation so consecutive layers always chain. Residual
//! additions are not volume-relevant here, so ResNets linearize into their
//! convolution backbones. The ViT proxy models each encoder block as four
//! token-wise projections (QKV, attention output, and the two MLP layers) at a
//! granularity where per-layer MACs and weight bytes drive the simulation.

use crate::workload::{LayerDescriptor, LayerKind, ModelLibrary, Padding};

/// Incremental model builder that threads output shapes into the next layer.
struct Chain {
    h: u32,
    w: u32,
    c: u32,
    layers: Vec<LayerDescriptor>,
}

impl Chain {
    fn input(h: u32, w: u32, c: u32) -> Chain {
        Chain { h, w, c, layers: Vec::new() }
    }

    fn push(&mut self, layer: LayerDescriptor) {
        let (oh, ow) = layer.out_dims().expect("builder produces valid layers");
        self.h = oh;
        self.w = ow;
        self.c = layer.out_c;
        self.layers.push(layer);
    }

    fn conv(mut self, k: u32, out_c: u32, stride: u32, padding: Padding) -> Chain {
        self.push(LayerDescriptor {
            kind: LayerKind::Conv,
            in_h: self.h,
            in_w: self.w,
            in_c: self.c,
            k_h: k,
            k_w: k,
            out_c,
            stride,
            padding,
            bytes_per_value: 1,
        });
        self
    }

    fn pool(mut self, k: u32, stride: u32, padding: Padding) -> Chain {
        self.push(LayerDescriptor {
            kind: LayerKind::Pool,
            in_h: self.h,
            in_w: self.w,
            in_c: self.c,
            k_h: k,
            k_w: k,
            out_c: self.c,
            stride,
            padding,
            bytes_per_value: 1,
        });
        self
    }

    fn fc(mut self, out_c: u32) -> Chain {
        let flattened = self.h * self.w * self.c;
        self.push(LayerDescriptor {
            kind: LayerKind::Fc,
            in_h: 1,
            in_w: 1,
            in_c: flattened,
            k_h: 1,
            k_w: 1,
            out_c,
            stride: 1,
            padding: Padding::Valid,
            bytes_per_value: 1,
        });
        self
    }

    fn proj(mut self, out_c: u32) -> Chain {
        self.push(LayerDescriptor {
            kind: LayerKind::AttentionProj,
            in_h: self.h,
            in_w: self.w,
            in_c: self.c,
            k_h: 1,
            k_w: 1,
            out_c,
            stride: 1,
            padding: Padding::Same,
            bytes_per_value: 1,
        });
        self
    }

    fn done(self) -> Vec<LayerDescriptor> {
        self.layers
    }
}

fn alexnet() -> Vec<LayerDescriptor> {
    Chain::input(227, 227, 3)
        .conv(11, 96, 4, Padding::Valid)
        .pool(3, 2, Padding::Valid)
        .conv(5, 256, 1, Padding::Same)
        .pool(3, 2, Padding::Valid)
        .conv(3, 384, 1, Padding::Same)
        .conv(3, 384, 1, Padding::Same)
        .conv(3, 256, 1, Padding::Same)
        .pool(3, 2, Padding::Valid)
        .fc(4096)
        .fc(4096)
        .fc(1000)
        .done()
}

/// Basic-block ResNet backbone (18/34): two 3x3 convs per block.
fn resnet_basic(blocks: [u32; 4]) -> Vec<LayerDescriptor> {
    let mut chain = Chain::input(224, 224, 3)
        .conv(7, 64, 2, Padding::Same)
        .pool(3, 2, Padding::Same);
    let widths = [64, 128, 256, 512];
    for (stage, &count) in blocks.iter().enumerate() {
        let width = widths[stage];
        for block in 0..count {
            let stride = if stage > 0 && block == 0 { 2 } else { 1 };
            chain = chain.conv(3, width, stride, Padding::Same).conv(3, width, 1, Padding::Same);
        }
    }
    chain.pool(7, 1, Padding::Valid).fc(1000).done()
}

/// Bottleneck ResNet backbone (50): 1x1 / 3x3 / 1x1 convs per block.
fn resnet_bottleneck(blocks: [u32; 4]) -> Vec<LayerDescriptor> {
    let mut chain = Chain::input(224, 224, 3)
        .conv(7, 64, 2, Padding::Same)
        .pool(3, 2, Padding::Same);
    let mids = [64, 128, 256, 512];
    for (stage, &count) in blocks.iter().enumerate() {
        let mid = mids[stage];
        for block in 0..count {
            let stride = if stage > 0 && block == 0 { 2 } else { 1 };
            chain = chain
                .conv(1, mid, 1, Padding::Same)
                .conv(3, mid, stride, Padding::Same)
                .conv(1, mid * 4, 1, Padding::Same);
        }
    }
    chain.pool(7, 1, Padding::Valid).fc(1000).done()
}

/// Transformer encoder proxy at projection granularity: a 16x16 patch embed
/// to a 14x14 token grid, then 12 blocks of four projections each.
fn vit_b_proxy() -> Vec<LayerDescriptor> {
    let mut chain = Chain::input(224, 224, 3).conv(16, 768, 16, Padding::Valid);
    for _ in 0..12 {
        chain = chain.proj(2304).proj(768).proj(3072).proj(768);
    }
    chain.pool(14, 1, Padding::Valid).fc(1000).done()
}

/// The built-in library: AlexNet, ResNet18/34/50, and the ViT-B proxy.
pub fn builtin_library() -> ModelLibrary {
    let mut lib = ModelLibrary::default();
    lib.insert("AlexNet", alexnet());
    lib.insert("ResNet18", resnet_basic([2, 2, 2, 2]));
    lib.insert("ResNet34", resnet_basic([3, 4, 6, 3]));
    lib.insert("ResNet50", resnet_bottleneck([3, 4, 6, 3]));
    lib.insert("ViT-B", vit_b_proxy());
    lib.validate().expect("builtin library is valid");
    lib
}

/// The four-CNN mix used by the stock workloads, uniform weights.
pub fn cnn_mix() -> Vec<(String, f64)> {
    ["AlexNet", "ResNet18", "ResNet34", "ResNet50"]
        .iter()
        .map(|n| (n.to_string(), 1.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::derive_layer_stats;

    fn total_weights(name: &str) -> u64 {
        builtin_library()
            .get(name)
            .unwrap()
            .iter()
            .map(|l| derive_layer_stats(l).unwrap().weight_bytes)
            .sum()
    }

    #[test]
    fn library_validates_and_has_expected_models() {
        let lib = builtin_library();
        for name in ["AlexNet", "ResNet18", "ResNet34", "ResNet50", "ViT-B"] {
            assert!(lib.get(name).is_some(), "missing {name}");
        }
    }

    #[test]
    fn weight_footprints_land_near_published_parameter_counts() {
        // 1 byte per value, so bytes track parameter counts.
        let alexnet = total_weights("AlexNet") as f64 / 1e6;
        assert!((55.0..68.0).contains(&alexnet), "AlexNet {alexnet} MB");
        let r18 = total_weights("ResNet18") as f64 / 1e6;
        assert!((10.0..14.0).contains(&r18), "ResNet18 {r18} MB");
        let r34 = total_weights("ResNet34") as f64 / 1e6;
        assert!((19.0..25.0).contains(&r34), "ResNet34 {r34} MB");
        let r50 = total_weights("ResNet50") as f64 / 1e6;
        assert!((20.0..30.0).contains(&r50), "ResNet50 {r50} MB");
        let vit = total_weights("ViT-B") as f64 / 1e6;
        assert!((85.0..115.0).contains(&vit), "ViT-B proxy {vit} MB");
    }

    #[test]
    fn alexnet_first_conv_shape() {
        let lib = builtin_library();
        let conv1 = &lib.get("AlexNet").unwrap()[0];
        assert_eq!(conv1.out_dims().unwrap(), (55, 55));
        let stats = derive_layer_stats(conv1).unwrap();
        // 55*55*96 outputs, 11*11*3 window
        assert_eq!(stats.macs, 55 * 55 * 96 * 11 * 11 * 3);
    }

    #[test]
    fn library_json_roundtrip() {
        let lib = builtin_library();
        let parsed = ModelLibrary::from_json(&lib.to_json()).unwrap();
        assert_eq!(
            parsed.get("ResNet50").unwrap().len(),
            lib.get("ResNet50").unwrap().len()
        );
    }
}
