/**
 * Selection state shared by the four panels, mutated only through
 * `applySelection`. Keeping the transition function pure makes replaying a
 * recorded event sequence reproduce the exact same state.
 */

export interface Viewport {
  center: [number, number];
  zoom: number;
}

export interface SelectionState {
  readonly selectedFips: string | null;
  readonly selectedPatternId: string | null;
  readonly viewport: Viewport;
}

export const INITIAL_SELECTION: SelectionState = {
  selectedFips: null,
  selectedPatternId: null,
  viewport: { center: [0, 0], zoom: 1 },
};

export type SelectionEvent =
  | { kind: 'county-click'; fips: string }
  | { kind: 'tile-click'; patternId: string; members: readonly string[] }
  | { kind: 'background-click' }
  | { kind: 'viewport-change'; viewport: Viewport };

/**
 * Linked-view rules:
 *  - county click selects the county and always clears the pattern
 *    selection; clicking the selected county again deselects it.
 *  - tile click selects the pattern and keeps the county selection only if
 *    that county is a member; clicking the selected tile again deselects it.
 *  - background (ocean) clicks are a no-op.
 */
export function applySelection(
  state: SelectionState,
  event: SelectionEvent,
): SelectionState {
  switch (event.kind) {
    case 'county-click': {
      const deselect = event.fips === state.selectedFips;
      return {
        ...state,
        selectedFips: deselect ? null : event.fips,
        selectedPatternId: null,
      };
    }
    case 'tile-click': {
      if (event.patternId === state.selectedPatternId) {
        return { ...state, selectedPatternId: null };
      }
      const keepCounty =
        state.selectedFips !== null && event.members.includes(state.selectedFips);
      return {
        ...state,
        selectedPatternId: event.patternId,
        selectedFips: keepCounty ? state.selectedFips : null,
      };
    }
    case 'background-click':
      return state;
    case 'viewport-change':
      return { ...state, viewport: event.viewport };
  }
}
