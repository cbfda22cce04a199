# This file is the single source of truth for event types.
# The Event table is synchronized with this list after every migrate.

EVENT_DEFINITIONS = [
    {"identifier": "RUN_STARTED", "name": "Запущен эксперимент"},
    {"identifier": "RUN_FINISHED", "name": "Эксперимент завершён"},
    {"identifier": "RUN_FAILED", "name": "Эксперимент завершился с ошибкой"},
    {"identifier": "RUN_INTERRUPTED", "name": "Эксперимент прерван"},
    {"identifier": "SPEC_REJECTED", "name": "Спецификация эксперимента отклонена"},
    {"identifier": "ANALYTIC_TABLE_SERVED", "name": "Выдана аналитическая таблица"},
    {"identifier": "API_THROTTLED", "name": "Запрос к API ограничен"},
    {"identifier": "ADMIN_LOGIN", "name": "Выполнен вход в панель администратора"},
]
