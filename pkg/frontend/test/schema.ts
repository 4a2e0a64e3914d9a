/** The SelectionQuery wire schema the API accepts, as a zod validator.
 * Contract tests check every condition the UI can create against it. */

import { z } from 'zod';

export const conditionSchema = z
  .object({
    kind: z.enum(['zone', 'lasso', 'path', 'value']),
    negated: z.boolean(),
    path_index: z.number().int().nonnegative().optional(),
    present: z.boolean().optional(),
    facet: z.enum(['values', 'datatypes', 'languages']).optional(),
    bucket_key: z.string().optional(),
    member_keys: z.array(z.string()).optional(),
    is_other: z.boolean().optional(),
    zone_id: z.number().int().nonnegative().optional(),
    polygon: z.array(z.tuple([z.number(), z.number()])).min(3).optional(),
  })
  .superRefine((condition, ctx) => {
    switch (condition.kind) {
      case 'path':
        if (condition.path_index === undefined) {
          ctx.addIssue({ code: 'custom', message: 'path condition requires path_index' });
        }
        break;
      case 'value':
        if (condition.path_index === undefined) {
          ctx.addIssue({ code: 'custom', message: 'value condition requires path_index' });
        }
        if (condition.is_other) {
          if (!condition.member_keys) {
            ctx.addIssue({ code: 'custom', message: 'OTHER must capture member keys' });
          }
        } else if (condition.bucket_key === undefined) {
          ctx.addIssue({ code: 'custom', message: 'value condition requires bucket_key' });
        }
        break;
      case 'zone':
        if (condition.zone_id === undefined) {
          ctx.addIssue({ code: 'custom', message: 'zone condition requires zone_id' });
        }
        break;
      case 'lasso':
        if (!condition.polygon) {
          ctx.addIssue({ code: 'custom', message: 'lasso condition requires polygon' });
        }
        break;
    }
  });

export const selectionQuerySchema = z
  .object({
    conditions: z.array(conditionSchema).min(1),
    scope: z.enum(['whole_set', 'current_selection']),
    current_ids: z.array(z.number().int().nonnegative()).optional(),
  })
  .superRefine((query, ctx) => {
    if (query.scope === 'current_selection' && query.current_ids === undefined) {
      ctx.addIssue({ code: 'custom', message: 'scoped query requires current_ids' });
    }
  });
