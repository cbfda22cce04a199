# File: apps/experiments/models.py
from django.db import models
from solo.models import SingletonModel


class SimulationDefaults(SingletonModel):
    """
    A singleton model holding run-wide numeric defaults of the simulator.

    The experiment runner reads it when a spec leaves a value out, and the
    analytic API reads its throttle period.
    """

    # Monte Carlo
    trials = models.PositiveIntegerField(
        verbose_name="Эпизодов на рабочую точку",
        default=10000,
        help_text="Число независимых эпизодов для оценки d_1 … d_M, если в спецификации не указано иное.",
    )
    retry_cap = models.PositiveIntegerField(
        verbose_name="Лимит повторных передач",
        default=10,
        help_text="Сколько раз ретранслятор повторяет блок, если ни один узел не может быть выбран.",
    )
    window_scale = models.FloatField(
        verbose_name="Масштаб окна моделирования",
        default=20.0,
        help_text="Радиус окна равен этому значению, делённому на √λ.",
    )
    contention_bits = models.PositiveIntegerField(
        verbose_name="Разрядность конкурентного выбора",
        default=10,
        help_text="Число временных единиц P импульсного выбора ретранслятора.",
    )

    # Analytic integrator
    integration_samples = models.PositiveIntegerField(
        verbose_name="Выборок на точку интегрирования",
        default=10000,
    )
    tail_tolerance = models.FloatField(
        verbose_name="Допуск хвоста интеграла",
        default=1e-3,
        help_text="Интегрирование прекращается, когда кольцо добавляет меньшую долю накопленной площади.",
    )

    # API
    analytic_throttle_seconds = models.PositiveIntegerField(
        verbose_name="Таймаут аналитического API",
        default=10,
        help_text="Не чаще одного запроса аналитической таблицы с одного IP за указанное число секунд. 0 - отключить ограничение.",
    )

    def __str__(self) -> str:
        """Return a string representation of the singleton model.

        Returns:
            A fixed string "Параметры моделирования по умолчанию".
        """
        return "Параметры моделирования по умолчанию"

    class Meta:
        verbose_name = "Параметры моделирования по умолчанию"


class ExperimentRun(models.Model):
    """
    One invocation of the experiment runner (a spec file or a built-in suite).
    """

    class Status(models.TextChoices):
        RUNNING = "RUNNING", "Выполняется"
        FINISHED = "FINISHED", "Завершён"
        FAILED = "FAILED", "Ошибка"
        INTERRUPTED = "INTERRUPTED", "Прерван"

    name = models.CharField("Название", max_length=255)
    source = models.CharField("Источник", max_length=500, help_text="Путь к файлу спецификации или имя набора.")
    seed = models.PositiveBigIntegerField("Начальное зерно")
    workers = models.PositiveIntegerField("Процессов", default=1)
    trials_scale = models.FloatField("Множитель числа эпизодов", default=1.0)
    status = models.CharField("Статус", max_length=12, choices=Status.choices, default=Status.RUNNING)
    output_dir = models.CharField("Каталог результатов", max_length=500, blank=True)
    summary = models.JSONField("Сводка", default=dict, blank=True)
    error = models.TextField("Ошибка", blank=True)
    started_at = models.DateTimeField("Начало", auto_now_add=True, db_index=True)
    finished_at = models.DateTimeField("Окончание", null=True, blank=True)

    def __str__(self) -> str:
        """Return a string representation of the run.

        Returns:
            A string with the run name and start time.
        """
        return f"{self.name} от {self.started_at.strftime('%Y-%m-%d %H:%M:%S')}"

    class Meta:
        verbose_name = "Запуск эксперимента"
        verbose_name_plural = "Запуски экспериментов"
        ordering = ["-started_at"]


class Observation(models.Model):
    """
    A single CSV row: one metric of one scheme at one sweep value.
    """

    run = models.ForeignKey(
        ExperimentRun,
        verbose_name="Запуск",
        related_name="observations",
        on_delete=models.CASCADE,
    )
    experiment = models.CharField("Эксперимент", max_length=255)
    scheme = models.CharField("Схема", max_length=3)
    objective = models.CharField("Целевая функция", max_length=10)
    sweep_axis = models.CharField("Ось развёртки", max_length=10)
    sweep_value = models.FloatField("Значение развёртки")
    metric = models.CharField("Метрика", max_length=50)
    mean = models.FloatField("Среднее")
    std_error = models.FloatField("Стандартная ошибка")
    n = models.PositiveIntegerField("Число испытаний")
    seed = models.PositiveBigIntegerField("Зерно")
    parameters = models.JSONField("Параметры", default=dict)

    def __str__(self) -> str:
        """Return a string representation of the observation.

        Returns:
            A string describing the metric, scheme and sweep value.
        """
        return f"{self.metric} {self.scheme}/{self.objective} при {self.sweep_axis}={self.sweep_value:g}"

    class Meta:
        verbose_name = "Наблюдение"
        verbose_name_plural = "Наблюдения"
        ordering = ["run", "experiment", "scheme", "objective", "sweep_value", "id"]
