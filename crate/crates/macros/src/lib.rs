//! Proc-macro backend for `batchsim::compose_batches!`.
//!
//! The macro enumerates every batch id in `0..=B`, where
//! `B = sum_{i=1}^{n} (types + 1)^i`, and emits one monomorphized
//! `Composed<Model, ID>::run` per id into a constant function-pointer table.
//! Each instantiation is a separate straight-line procedure whose handler
//! calls are resolved at compile time, so the optimizer sees the whole batch.
//!
//! Use it through the re-export in `batchsim`; the first argument is the path
//! of the runtime crate and is filled in by that wrapper.

use proc_macro::TokenStream;
use quote::quote;
use syn::parse::{Parse, ParseStream};
use syn::{parse_macro_input, Ident, LitInt, Path, Token, Type};

/// Longest batch a single composed procedure can hold. Mirrors
/// `batchsim::composer::MAX_COMPOSED_LEN`.
const MAX_COMPOSED_LEN: u64 = 8;

/// Default ceiling on generated entries.
const DEFAULT_CAP: u64 = 100_000;

struct ComposeInput {
    krate: Path,
    model: Type,
    types: u64,
    max_len: u64,
    cap: u64,
}

impl Parse for ComposeInput {
    fn parse(input: ParseStream) -> syn::Result<Self> {
        let krate: Path = input.parse()?;
        input.parse::<Token![;]>()?;
        let model: Type = input.parse()?;

        let mut types = None;
        let mut max_len = None;
        let mut cap = DEFAULT_CAP;
        while !input.is_empty() {
            input.parse::<Token![,]>()?;
            if input.is_empty() {
                break;
            }
            let key: Ident = input.parse()?;
            input.parse::<Token![=]>()?;
            let value: LitInt = input.parse()?;
            let parsed = value.base10_parse::<u64>()?;
            match key.to_string().as_str() {
                "types" => types = Some((parsed, value)),
                "max_len" => max_len = Some((parsed, value)),
                "cap" => cap = parsed,
                other => {
                    return Err(syn::Error::new(
                        key.span(),
                        format!("unknown option `{other}`, expected `types`, `max_len` or `cap`"),
                    ))
                }
            }
        }

        let (types, types_lit) =
            types.ok_or_else(|| input.error("missing `types = <alphabet size>`"))?;
        let (max_len, max_len_lit) =
            max_len.ok_or_else(|| input.error("missing `max_len = <batch length>`"))?;
        if types == 0 {
            return Err(syn::Error::new(types_lit.span(), "alphabet must hold at least one event type"));
        }
        if max_len == 0 || max_len > MAX_COMPOSED_LEN {
            return Err(syn::Error::new(
                max_len_lit.span(),
                format!("max_len must lie in 1..={MAX_COMPOSED_LEN}"),
            ));
        }
        Ok(ComposeInput { krate, model, types, max_len, cap })
    }
}

/// `sum_{i=1}^{n} base^i`, or `None` on overflow.
fn batch_count(types: u64, max_len: u64) -> Option<u64> {
    let base = types.checked_add(1)?;
    let mut power = 1u64;
    let mut total = 0u64;
    for _ in 0..max_len {
        power = power.checked_mul(base)?;
        total = total.checked_add(power)?;
    }
    Some(total)
}

#[proc_macro]
pub fn compose_batches_impl(input: TokenStream) -> TokenStream {
    let ComposeInput { krate, model, types, max_len, cap } =
        parse_macro_input!(input as ComposeInput);

    let total = match batch_count(types, max_len) {
        Some(total) if total < cap => total,
        Some(total) => {
            let msg = format!(
                "composing {} batches exceeds the generation cap of {cap} entries",
                total + 1
            );
            return syn::Error::new_spanned(&model, msg).to_compile_error().into();
        }
        None => {
            return syn::Error::new_spanned(&model, "batch id space overflows u64")
                .to_compile_error()
                .into()
        }
    };

    let entries = (0..=total).map(|id| {
        quote! { <#krate::composer::Composed<#model, #id>>::run }
    });
    let types_usize = types as usize;
    let max_len_u32 = max_len as u32;
    let check_msg = format!("compose_batches!: model does not register exactly {types} handlers");

    quote! {
        const _: () = ::core::assert!(
            <#model as #krate::model::Model>::HANDLERS.len() == #types_usize,
            #check_msg
        );

        impl #krate::composer::ComposedBatches for #model {
            const MAX_BATCH_LEN: u32 = #max_len_u32;
            const ENTRIES: &'static [#krate::composer::BatchFn<Self>] = &[#(#entries),*];
        }
    }
    .into()
}

#[cfg(test)]
mod tests {
    use super::batch_count;

    #[test]
    fn counts_match_geometric_sum() {
        assert_eq!(batch_count(2, 2), Some(12));
        assert_eq!(batch_count(1, 1), Some(2));
        assert_eq!(batch_count(5, 5), Some(9330));
        assert_eq!(batch_count(u64::MAX, 2), None);
    }
}
